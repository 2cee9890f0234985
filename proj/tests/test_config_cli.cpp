#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kcell/campaign.hpp"
#include "kcell/config.hpp"
#include "kcell/errors.hpp"
#include "kcell/functionals.hpp"

using namespace kcell;
using nlohmann::json;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
  for (const std::string& f : e.fields)
    if (f.find(needle) != std::string::npos) return true;
  return false;
}

json gap_json() {
  return json{{"experiment", "gap"},
              {"d", 2},
              {"body", {{"type", "ball"}, {"radius", 1.0}}},
              {"n_grid", {8.0, 16.0}},
              {"reps", 30},
              {"seed", 41}};
}

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
  CampaignConfig cfg = parse_config(gap_json());
  CHECK(cfg.experiment == ExperimentKind::Gap);
  CHECK(cfg.campaign_id == "gap-d2");
  CHECK(cfg.workers == 1);
  CHECK(cfg.seed == 41);
  CHECK(cfg.r == doctest::Approx(0.25));
  CHECK(cfg.inflate == doctest::Approx(1.0));
  CHECK(cfg.alphas == std::vector<double>{0.25, 0.5, 0.75});
  CHECK(!cfg.window.has_value());
  CHECK(cfg.quad_nodes == 0);
  CHECK(cfg.warnings.empty());

  json alias = gap_json();
  alias.erase("seed");
  alias["master_seed"] = 99;
  alias["campaign_id"] = "pilot-a";
  CampaignConfig cfg2 = parse_config(alias);
  CHECK(cfg2.seed == 99);
  CHECK(cfg2.campaign_id == "pilot-a");
}

TEST_CASE("every violated field is reported at once") {
  json bad = {{"experiment", "warp"},
              {"d", 1},
              {"n_grid", {4.0, 4.0}},
              {"reps", 0},
              {"workers", -2}};
  try {
    parse_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.fields.size() >= 5);
    CHECK(mentions(e, "experiment: unknown value 'warp'"));
    CHECK(mentions(e, "d: must be in"));
    CHECK(mentions(e, "body: required"));
    CHECK(mentions(e, "n_grid: must be strictly increasing"));
    CHECK(mentions(e, "reps: required integer >= 1"));
    CHECK(mentions(e, "workers: expected integer >= 1"));
  }
}

TEST_CASE("body parsing covers every declared shape") {
  std::vector<std::string> errors;

  json ball = {{"type", "ball"}, {"center", {1.0, 0.0}}, {"radius", 0.5}};
  ConvexBody b = body_from_json(ball, "body", errors, 2);
  CHECK(errors.empty());
  CHECK(support(b, Direction(Vec{1.0, 0.0})) == doctest::Approx(1.5));

  json vp = {{"type", "vpolytope"}, {"vertices", {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}}};
  ConvexBody tri = body_from_json(vp, "body", errors, 2);
  CHECK(errors.empty());
  CHECK(support(tri, Direction(Vec{0.0, 1.0})) == doctest::Approx(1.0));

  json hp = {{"type", "hpolytope"},
             {"normals", {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}},
             {"offsets", {1.0, 1.0, 1.0, 1.0}}};
  ConvexBody box = body_from_json(hp, "body", errors, 2);
  CHECK(errors.empty());
  REQUIRE(box.as<HPolytope>() != nullptr);
  CHECK(box.as<HPolytope>()->halfspaces.size() == 4);
  CHECK(mean_width(box) == doctest::Approx(8.0 / 3.14159265358979323846));

  json cube = {{"type", "cube"}, {"half_side", 0.5}};
  ConvexBody c = body_from_json(cube, "body", errors, 3);
  CHECK(errors.empty());
  CHECK(support(c, Direction(Vec{0.0, 0.0, 1.0})) == doctest::Approx(0.5));
}

TEST_CASE("body parse errors carry field paths") {
  std::vector<std::string> errors;
  body_from_json(json{{"type", "ball"}, {"radius", -2.0}}, "body", errors, 2);
  body_from_json(json{{"type", "vpolytope"}, {"vertices", {{1.0, 0.0}, {1.0}}}},
                 "body_l", errors, 2);
  body_from_json(json{{"type", "hpolytope"},
                      {"normals", {{1.0, 0.0}}},
                      {"offsets", {-3.0}}},
                 "body", errors, 2);
  body_from_json(json{{"type", "pyramid"}}, "body", errors, 2);
  body_from_json(json{{"type", "cube"}}, "body", errors, 2);

  REQUIRE(errors.size() == 5);
  CHECK(errors[0].find("body.radius") == 0);
  CHECK(errors[1].find("body_l.vertices[1]") == 0);
  CHECK(errors[2].find("body.interior") == 0);
  CHECK(errors[3].find("body.type: unknown body type 'pyramid'") == 0);
  CHECK(errors[4].find("body.half_side") == 0);
}

TEST_CASE("experiment-specific requirements") {
  json rate = gap_json();
  rate["experiment"] = "rate";
  CHECK_THROWS_WITH_AS(parse_config(rate),
                       doctest::Contains("rate fits need at least 4 points"),
                       ConfigError);
  rate["n_grid"] = {8.0, 16.0, 32.0, 64.0};
  CHECK_NOTHROW(parse_config(rate));

  json equiv = {{"experiment", "equiv"}, {"d", 2}, {"n_grid", {32.0}},
                {"reps", 64}, {"r", 0.25}};
  CampaignConfig eq = parse_config(equiv);
  CHECK(!eq.body.has_value());

  json conc = gap_json();
  conc["experiment"] = "concavity";
  try {
    parse_config(conc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "body_l: required"));
  }

  json high = gap_json();
  high["d"] = 5;
  high["body"] = {{"type", "cube"}, {"half_side", 0.5}};
  CampaignConfig hd = parse_config(high);
  REQUIRE(hd.warnings.size() == 1);
  CHECK(hd.warnings[0].find("QMC") != std::string::npos);
}

TEST_CASE("window and quadrature overrides are validated") {
  json cfg = gap_json();
  cfg["window"] = {{"kind", "ball"}, {"radius", 6.0}};
  cfg["quad_nodes"] = 128;
  CampaignConfig parsed = parse_config(cfg);
  REQUIRE(parsed.window.has_value());
  CHECK(parsed.window->kind == Window::Kind::Ball);
  CHECK(parsed.window->radius == doctest::Approx(6.0));
  CHECK(parsed.quad_nodes == 128);

  cfg["window"] = {{"kind", "cone"}, {"radius", 6.0}};
  cfg["quad_nodes"] = 8;
  try {
    parse_config(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "window:"));
    CHECK(mentions(e, "quad_nodes:"));
  }
}

TEST_CASE("load_config reports unreadable and unparsable input") {
  CHECK_THROWS_WITH_AS(load_config("/nonexistent/path.json"),
                       doctest::Contains("cannot open"), ConfigError);

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "kcell_cfg_test";
  fs::create_directories(dir);
  fs::path bad = dir / "bad.json";
  std::ofstream(bad.string()) << "{ not json";
  CHECK_THROWS_WITH_AS(load_config(bad.string()),
                       doctest::Contains("JSON parse error"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("campaign output is deterministic and worker-independent") {
  CampaignConfig cfg = parse_config(gap_json());
  CampaignOutput a = run_campaign(cfg);
  CampaignOutput b = run_campaign(cfg);
  CHECK(csv_from_rows(a.rows) == csv_from_rows(b.rows));

  cfg.workers = 4;
  CampaignOutput c = run_campaign(cfg);
  CHECK(csv_from_rows(a.rows) == csv_from_rows(c.rows));

  CampaignConfig other = cfg;
  other.seed = 42;
  CampaignOutput d = run_campaign(other);
  CHECK(csv_from_rows(a.rows) != csv_from_rows(d.rows));

  REQUIRE(a.rows.size() == 2);
  CHECK(a.rows[0].n == doctest::Approx(8.0));
  CHECK(a.rows[1].n == doctest::Approx(16.0));
  CHECK(a.rows[0].mean_gap > a.rows[1].mean_gap);
  CHECK(a.checks_passed);

  std::string csv = csv_from_rows(a.rows);
  CHECK(csv.rfind("campaign_id,experiment,d,body,n,reps,mean_gap,stderr,trunc_count,seed\n",
                  0) == 0);
}

TEST_CASE("replay detects both fidelity and tampering") {
  namespace fs = std::filesystem;
  CampaignConfig cfg = parse_config(gap_json());
  CampaignOutput out = run_campaign(cfg);

  fs::path dir = fs::temp_directory_path() / "kcell_replay_test";
  fs::create_directories(dir);
  write_campaign_files(out, dir.string());
  CHECK(fs::exists(dir / "rows.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "plot.svg"));

  fs::path csv = dir / "rows.csv";
  ReplayResult ok = replay_campaign(cfg, csv.string());
  CHECK(ok.identical);
  CHECK(ok.first_diff_line == 0);

  // Flip one digit on the first data row.
  std::ifstream in(csv.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  in.close();
  size_t pos = text.find("gap-d2");
  REQUIRE(pos != std::string::npos);
  text[pos] = 'G';
  std::ofstream(csv.string(), std::ios::binary) << text;

  ReplayResult tampered = replay_campaign(cfg, csv.string());
  CHECK(!tampered.identical);
  CHECK(tampered.first_diff_line == 2);
  CHECK(tampered.expected_line.find("Gap-d2") == 0);
  CHECK(tampered.actual_line.find("gap-d2") == 0);
  fs::remove_all(dir);
}
