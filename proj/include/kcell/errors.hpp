#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kcell {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Sampling window does not contain the body it is supposed to enclose.
struct WindowTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Polar map is undefined for hyperplanes meeting the unit ball.
struct HitsUnitBall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// separating_measure requires K subset of L.
struct NotNested : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// min_gain_on_hyperplane requires a hyperplane disjoint from the body.
struct HitsBody : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Rate fits need at least four distinct grid points.
struct DegenerateGrid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An LP fed to the support engine had no feasible point.  Cells always
// contain their body, so this indicates a bug, not a data condition.
struct InfeasibleError : std::logic_error {
  using std::logic_error::logic_error;
};

// Configuration validation failure; lists every offending field path.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> field_errors)
      : std::runtime_error(join(field_errors)), fields(std::move(field_errors)) {}

  std::vector<std::string> fields;

 private:
  static std::string join(const std::vector<std::string>& fs) {
    std::string s = "invalid config:";
    for (const auto& f : fs) s += "\n  " + f;
    return s;
  }
};

}  // namespace kcell
