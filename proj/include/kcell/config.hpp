#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kcell/geom.hpp"

#include "json.hpp"

namespace kcell {

enum class ExperimentKind { Gap, Rate, Equiv, Concavity, Tail, LowerBound };

std::string experiment_name(ExperimentKind kind);

struct CampaignConfig {
  std::string campaign_id;
  ExperimentKind experiment = ExperimentKind::Gap;
  int d = 2;
  std::optional<ConvexBody> body;    // required except for equiv
  std::optional<ConvexBody> body_l;  // concavity only
  std::vector<double> n_grid;
  int reps = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::vector<double> alphas;        // concavity
  double r = 0.25;                   // equiv: polar shell / window 1/r
  double inflate = 1.0;              // lowerbound negative control knob
  std::optional<Window> window;      // overrides the default window policy
  int quad_nodes = 0;                // quadrature override, 0 = dimension default
  std::vector<std::string> warnings;  // non-fatal notes (e.g. d > 3 quadrature)
};

// Body parsers; error strings are field paths rooted at `where`.
ConvexBody body_from_json(const nlohmann::json& j, const std::string& where,
                          std::vector<std::string>& errors, int expect_dim);

// Parses and validates; throws ConfigError listing every violated field.
CampaignConfig parse_config(const nlohmann::json& j);
CampaignConfig load_config(const std::string& path);

}  // namespace kcell
