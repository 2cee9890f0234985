#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "kcell/campaign.hpp"
#include "kcell/errors.hpp"

namespace {

// SEED in the environment overrides the config seed; campaign_ids derived
// from the experiment name stay stable so output paths do not move.
void apply_overrides(kcell::CampaignConfig& cfg, int workers) {
  if (const char* seed = std::getenv("SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(seed, &end, 10);
    if (end && *end == '\0') cfg.seed = v;
  }
  if (workers > 0) cfg.workers = workers;
}

int config_failure(const kcell::ConfigError& e) {
  std::fprintf(stderr, "config error:\n");
  for (const std::string& field : e.fields)
    std::fprintf(stderr, "  %s\n", field.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-cell simulation campaigns"};
  app.require_subcommand(1);

  std::string config_path, csv_path, out_dir;
  int workers = 0;
  bool check = false;

  CLI::App* run = app.add_subcommand("run", "run a campaign from a config file");
  run->add_option("config", config_path, "campaign config JSON")->required();
  run->add_option("--workers", workers, "worker thread count override");
  run->add_option("--out", out_dir, "output directory (default out/<campaign_id>)");
  run->add_flag("--check", check, "exit 1 unless all invariant checks pass");

  CLI::App* replay = app.add_subcommand("replay", "re-run and byte-compare a prior CSV");
  replay->add_option("csv", csv_path, "previously written rows.csv")->required();
  replay->add_option("config", config_path, "campaign config JSON")->required();
  replay->add_option("--workers", workers, "worker thread count override");

  CLI11_PARSE(app, argc, argv);

  kcell::CampaignConfig cfg;
  try {
    cfg = kcell::load_config(config_path);
  } catch (const kcell::ConfigError& e) {
    return config_failure(e);
  }
  apply_overrides(cfg, workers);
  for (const std::string& w : cfg.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());

  try {
    if (run->parsed()) {
      if (out_dir.empty()) out_dir = "out/" + cfg.campaign_id;
      kcell::CampaignOutput out = kcell::run_campaign(cfg);
      kcell::write_campaign_files(out, out_dir);
      std::printf("%s: %zu rows -> %s\n", cfg.campaign_id.c_str(), out.rows.size(),
                  out_dir.c_str());
      for (const std::string& msg : out.check_messages)
        std::fprintf(stderr, "check: %s\n", msg.c_str());
      if (check && !out.checks_passed) return 1;
      return 0;
    }

    kcell::ReplayResult result = kcell::replay_campaign(cfg, csv_path);
    if (result.identical) {
      std::printf("replay: identical\n");
      return 0;
    }
    std::fprintf(stderr, "replay: first difference at line %d\n  stored: %s\n  fresh:  %s\n",
                 result.first_diff_line, result.expected_line.c_str(),
                 result.actual_line.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
