#include "kcell/config.hpp"

#include <fstream>
#include <sstream>

#include "kcell/errors.hpp"

namespace kcell {

using nlohmann::json;

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Gap: return "gap";
    case ExperimentKind::Rate: return "rate";
    case ExperimentKind::Equiv: return "equiv";
    case ExperimentKind::Concavity: return "concavity";
    case ExperimentKind::Tail: return "tail";
    case ExperimentKind::LowerBound: return "lowerbound";
  }
  return "unknown";
}

namespace {

bool read_vec(const json& j, int expect_dim, Vec& out) {
  if (!j.is_array() || static_cast<int>(j.size()) != expect_dim) return false;
  out = Vec(expect_dim);
  for (int i = 0; i < expect_dim; ++i) {
    if (!j[static_cast<size_t>(i)].is_number()) return false;
    out[i] = j[static_cast<size_t>(i)].get<double>();
  }
  return true;
}

std::optional<double> read_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

ConvexBody body_from_json(const json& j, const std::string& where,
                          std::vector<std::string>& errors, int expect_dim) {
  size_t before = errors.size();
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    errors.push_back(where + ".type: required string");
    return make_unit_ball(std::max(2, expect_dim));
  }
  std::string type = j["type"].get<std::string>();
  if (type == "ball") {
    Vec center = Vec::zero(expect_dim);
    if (j.contains("center") && !read_vec(j["center"], expect_dim, center))
      errors.push_back(where + ".center: expected array of " +
                       std::to_string(expect_dim) + " numbers");
    std::optional<double> radius = read_number(j, "radius");
    if (!radius || !(*radius > 0.0))
      errors.push_back(where + ".radius: required positive number");
    if (errors.size() > before) return make_unit_ball(expect_dim);
    return make_ball(center, *radius);
  }
  if (type == "vpolytope") {
    std::vector<Vec> vertices;
    if (j.contains("vertices") && j["vertices"].is_array()) {
      for (size_t i = 0; i < j["vertices"].size(); ++i) {
        Vec v(expect_dim);
        if (!read_vec(j["vertices"][i], expect_dim, v))
          errors.push_back(where + ".vertices[" + std::to_string(i) + "]: expected array of " +
                           std::to_string(expect_dim) + " numbers");
        else
          vertices.push_back(v);
      }
    }
    if (vertices.empty())
      errors.push_back(where + ".vertices: required nonempty array");
    if (errors.size() > before) return make_unit_ball(expect_dim);
    return make_vpolytope(vertices);
  }
  if (type == "hpolytope") {
    std::vector<Hyperplane> rows;
    bool shape_ok = j.contains("normals") && j["normals"].is_array() &&
                    j.contains("offsets") && j["offsets"].is_array() &&
                    j["normals"].size() == j["offsets"].size() &&
                    !j["normals"].empty();
    if (!shape_ok) {
      errors.push_back(where + ": hpolytope needs equal-length nonempty normals/offsets");
    } else {
      for (size_t i = 0; i < j["normals"].size(); ++i) {
        Vec nvec(expect_dim);
        if (!read_vec(j["normals"][i], expect_dim, nvec) || nvec.norm() < 1e-12) {
          errors.push_back(where + ".normals[" + std::to_string(i) + "]: expected nonzero array of " +
                           std::to_string(expect_dim) + " numbers");
          continue;
        }
        if (!j["offsets"][i].is_number()) {
          errors.push_back(where + ".offsets[" + std::to_string(i) + "]: expected number");
          continue;
        }
        rows.push_back(Hyperplane{Direction(nvec), j["offsets"][i].get<double>()});
      }
    }
    Vec interior = Vec::zero(expect_dim);
    if (j.contains("interior") && !read_vec(j["interior"], expect_dim, interior))
      errors.push_back(where + ".interior: expected array of " +
                       std::to_string(expect_dim) + " numbers");
    if (errors.size() > before) return make_unit_ball(expect_dim);
    for (const Hyperplane& h : rows)
      if (dot(h.normal.vec(), interior) > h.offset - 1e-12) {
        errors.push_back(where + ".interior: not strictly inside every halfspace");
        return make_unit_ball(expect_dim);
      }
    return make_hpolytope(rows, interior);
  }
  if (type == "cube") {
    std::optional<double> half = read_number(j, "half_side");
    if (!half || !(*half > 0.0)) {
      errors.push_back(where + ".half_side: required positive number");
      return make_unit_ball(expect_dim);
    }
    return make_cube(expect_dim, *half);
  }
  errors.push_back(where + ".type: unknown body type '" + type + "'");
  return make_unit_ball(expect_dim);
}

CampaignConfig parse_config(const json& j) {
  std::vector<std::string> errors;
  CampaignConfig cfg;

  if (!j.is_object()) throw ConfigError({"config: expected a JSON object"});

  if (!j.contains("experiment") || !j["experiment"].is_string()) {
    errors.push_back("experiment: required string");
  } else {
    std::string name = j["experiment"].get<std::string>();
    bool found = false;
    for (ExperimentKind kind :
         {ExperimentKind::Gap, ExperimentKind::Rate, ExperimentKind::Equiv,
          ExperimentKind::Concavity, ExperimentKind::Tail, ExperimentKind::LowerBound}) {
      if (experiment_name(kind) == name) {
        cfg.experiment = kind;
        found = true;
        break;
      }
    }
    if (!found)
      errors.push_back("experiment: unknown value '" + name +
                       "' (gap|rate|equiv|concavity|tail|lowerbound)");
  }

  if (!j.contains("d") || !j["d"].is_number_integer()) {
    errors.push_back("d: required integer");
  } else {
    cfg.d = j["d"].get<int>();
    if (cfg.d < 2 || cfg.d > kMaxDim)
      errors.push_back("d: must be in [2, " + std::to_string(kMaxDim) + "]");
    else if (cfg.d > 3)
      cfg.warnings.push_back("d > 3 uses QMC spherical quadrature; width values carry "
                             "quadrature error beyond the stated tolerances");
  }
  int dim = (cfg.d >= 2 && cfg.d <= kMaxDim) ? cfg.d : 2;

  bool needs_body = cfg.experiment != ExperimentKind::Equiv;
  if (j.contains("body")) {
    cfg.body = body_from_json(j["body"], "body", errors, dim);
  } else if (needs_body) {
    errors.push_back("body: required for this experiment");
  }
  if (cfg.experiment == ExperimentKind::Concavity) {
    if (j.contains("body_l"))
      cfg.body_l = body_from_json(j["body_l"], "body_l", errors, dim);
    else
      errors.push_back("body_l: required for concavity");
  }

  if (!j.contains("n_grid") || !j["n_grid"].is_array() || j["n_grid"].empty()) {
    errors.push_back("n_grid: required nonempty array of numbers");
  } else {
    for (size_t i = 0; i < j["n_grid"].size(); ++i) {
      if (!j["n_grid"][i].is_number() || !(j["n_grid"][i].get<double>() > 0.0)) {
        errors.push_back("n_grid[" + std::to_string(i) + "]: expected positive number");
        continue;
      }
      cfg.n_grid.push_back(j["n_grid"][i].get<double>());
    }
    for (size_t i = 1; i < cfg.n_grid.size(); ++i)
      if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
        errors.push_back("n_grid: must be strictly increasing");
        break;
      }
    if (cfg.experiment == ExperimentKind::Rate && cfg.n_grid.size() < 4)
      errors.push_back("n_grid: rate fits need at least 4 points");
  }

  if (!j.contains("reps") || !j["reps"].is_number_integer() ||
      j["reps"].get<int>() < 1)
    errors.push_back("reps: required integer >= 1");
  else
    cfg.reps = j["reps"].get<int>();

  const char* seed_key = j.contains("seed") ? "seed"
                         : j.contains("master_seed") ? "master_seed"
                                                     : nullptr;
  if (seed_key) {
    if (!j[seed_key].is_number_unsigned() && !j[seed_key].is_number_integer())
      errors.push_back(std::string(seed_key) + ": expected nonnegative integer");
    else
      cfg.seed = j[seed_key].get<std::uint64_t>();
  }

  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 1)
      errors.push_back("workers: expected integer >= 1");
    else
      cfg.workers = j["workers"].get<int>();
  }

  if (j.contains("alphas")) {
    if (!j["alphas"].is_array())
      errors.push_back("alphas: expected array of numbers in (0,1)");
    else
      for (size_t i = 0; i < j["alphas"].size(); ++i) {
        double a = j["alphas"][i].is_number() ? j["alphas"][i].get<double>() : -1.0;
        if (!(a > 0.0 && a < 1.0))
          errors.push_back("alphas[" + std::to_string(i) + "]: expected number in (0,1)");
        else
          cfg.alphas.push_back(a);
      }
  }
  if (cfg.alphas.empty()) cfg.alphas = {0.25, 0.5, 0.75};

  if (j.contains("r")) {
    std::optional<double> r = read_number(j, "r");
    if (!r || !(*r > 0.0 && *r < 1.0))
      errors.push_back("r: expected number in (0,1)");
    else
      cfg.r = *r;
  }

  if (j.contains("inflate")) {
    std::optional<double> f = read_number(j, "inflate");
    if (!f || !(*f > 0.0))
      errors.push_back("inflate: expected positive number");
    else
      cfg.inflate = *f;
  }

  if (j.contains("window")) {
    const json& w = j["window"];
    std::string kind = w.is_object() && w.contains("kind") && w["kind"].is_string()
                           ? w["kind"].get<std::string>()
                           : "";
    std::optional<double> radius =
        w.is_object() ? read_number(w, "radius") : std::nullopt;
    if ((kind != "box" && kind != "ball") || !radius || !(*radius > 0.0))
      errors.push_back("window: expected {\"kind\":\"box\"|\"ball\",\"radius\":>0}");
    else
      cfg.window = Window{kind == "box" ? Window::Kind::Box : Window::Kind::Ball,
                          *radius};
  }

  if (j.contains("quad_nodes")) {
    if (!j["quad_nodes"].is_number_integer() || j["quad_nodes"].get<int>() < 16)
      errors.push_back("quad_nodes: expected integer >= 16");
    else
      cfg.quad_nodes = j["quad_nodes"].get<int>();
  }

  if (j.contains("campaign_id") && j["campaign_id"].is_string())
    cfg.campaign_id = j["campaign_id"].get<std::string>();
  if (cfg.campaign_id.empty())
    cfg.campaign_id = experiment_name(cfg.experiment) + "-d" + std::to_string(dim);

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

CampaignConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open '" + path + "'"});
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError({"config: JSON parse error: " + std::string(e.what())});
  }
  return parse_config(j);
}

}  // namespace kcell
