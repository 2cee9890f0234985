#pragma once

#include <string>
#include <vector>

#include "kcell/config.hpp"

namespace kcell {

// One CSV row.  Every experiment writes the same columns; mean_gap/stderr
// hold the experiment's headline scalar (width gap, concavity margin, tail
// decay rate -- see README for the per-experiment semantics).
struct CampaignRow {
  std::string campaign_id;
  std::string experiment;
  int d = 2;
  std::string body;
  double n = 0.0;
  int reps = 0;
  double mean_gap = 0.0;
  double stderr_ = 0.0;
  std::uint64_t trunc_count = 0;
  std::uint64_t seed = 0;
};

struct CampaignOutput {
  std::vector<CampaignRow> rows;
  std::string summary_json;       // fit results, p-values, wall times
  std::string svg;                // empty when the experiment has no plot
  bool checks_passed = true;      // --check verdict
  std::vector<std::string> check_messages;
};

// Runs the configured experiment.  Deterministic given (config, seed):
// rows and summary (minus wall times) are bit-identical across reruns and
// worker counts.
CampaignOutput run_campaign(const CampaignConfig& config);

std::string csv_from_rows(const std::vector<CampaignRow>& rows);

// Writes rows.csv, summary.json and plot.svg (when present) under out_dir.
void write_campaign_files(const CampaignOutput& out, const std::string& out_dir);

struct ReplayResult {
  bool identical = false;
  int first_diff_line = 0;  // 1-based; 0 when identical
  std::string expected_line;
  std::string actual_line;
};

// Re-runs the campaign and byte-compares the fresh CSV against the stored
// one.
ReplayResult replay_campaign(const CampaignConfig& config, const std::string& csv_path);

}  // namespace kcell
