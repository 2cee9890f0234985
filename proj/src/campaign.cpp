#include "kcell/campaign.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kcell/cell.hpp"
#include "kcell/errors.hpp"
#include "kcell/experiments.hpp"
#include "kcell/svg.hpp"

namespace kcell {

using nlohmann::json;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string body_label(const ConvexBody& body) {
  if (const Ball* b = body.as<Ball>()) return "ball(" + g6(b->radius) + ")";
  if (const VPolytope* p = body.as<VPolytope>())
    return "vpoly(" + std::to_string(p->vertices.size()) + "v)";
  if (const HPolytope* p = body.as<HPolytope>())
    return "hpoly(" + std::to_string(p->halfspaces.size()) + "h)";
  if (const SupportCombo* c = body.as<SupportCombo>())
    return "combo(" + std::to_string(c->parts.size()) + ")";
  return "body";
}

SphericalQuadrature build_quadrature(const CampaignConfig& cfg) {
  if (cfg.quad_nodes <= 0) return SphericalQuadrature::default_for(cfg.d);
  if (cfg.d == 2) return SphericalQuadrature::uniform_angles_2d(cfg.quad_nodes + (cfg.quad_nodes & 1));
  if (cfg.d == 3) return SphericalQuadrature::spherical_design_3d(cfg.quad_nodes);
  return SphericalQuadrature::qmc(cfg.d, cfg.quad_nodes);
}

CampaignRow base_row(const CampaignConfig& cfg, const std::string& body) {
  CampaignRow row;
  row.campaign_id = cfg.campaign_id;
  row.experiment = experiment_name(cfg.experiment);
  row.d = cfg.d;
  row.body = body;
  row.reps = cfg.reps;
  row.seed = cfg.seed;
  return row;
}

// Decreasing along the grid up to twice the combined standard error.
void check_monotone(const std::vector<CampaignRow>& rows, CampaignOutput& out) {
  for (size_t i = 1; i < rows.size(); ++i) {
    double slack = 2.0 * std::sqrt(rows[i - 1].stderr_ * rows[i - 1].stderr_ +
                                   rows[i].stderr_ * rows[i].stderr_);
    if (rows[i].mean_gap > rows[i - 1].mean_gap + slack) {
      out.checks_passed = false;
      out.check_messages.push_back(
          "gap not decreasing: n=" + g6(rows[i].n) + " mean " + g6(rows[i].mean_gap) +
          " vs n=" + g6(rows[i - 1].n) + " mean " + g6(rows[i - 1].mean_gap));
    }
  }
}

json gap_json(const GapEstimate& e) {
  return json{{"n", e.intensity},
              {"reps", e.reps},
              {"mean_gap", e.mean_gap},
              {"stderr", e.stderr_},
              {"trunc_count", e.truncation_count},
              {"wall_time_s", e.wall_time_s}};
}

std::string gap_svg(const std::vector<CampaignRow>& rows, const std::string& title,
                    const RateFit* fit) {
  PlotSeries data;
  data.label = "mean gap";
  data.color = "#1f77b4";
  for (const CampaignRow& r : rows) {
    data.x.push_back(r.n);
    data.y.push_back(r.mean_gap);
  }
  std::vector<PlotSeries> series{data};
  std::string annotation;
  if (fit) {
    PlotSeries line;
    line.label = "fit";
    line.color = "#d62728";
    line.draw_points = false;
    for (double n : {rows.front().n, rows.back().n}) {
      line.x.push_back(n);
      line.y.push_back(std::exp(fit->intercept) * std::pow(n, fit->slope));
    }
    series.push_back(line);
    annotation = "slope " + g6(fit->slope) + " [" + g6(fit->slope_ci_lo) + ", " +
                 g6(fit->slope_ci_hi) + "]";
  }
  return render_plot(series, title, "intensity n", "mean width gap", true, true,
                     annotation);
}

json ks_json(const KsResult& ks) {
  return json{{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"exact", ks.exact}};
}

}  // namespace

CampaignOutput run_campaign(const CampaignConfig& cfg) {
  CampaignOutput out;
  RunPolicy policy{cfg.seed, cfg.workers, 0};
  SphericalQuadrature quad = build_quadrature(cfg);
  json summary;
  summary["campaign_id"] = cfg.campaign_id;
  summary["experiment"] = experiment_name(cfg.experiment);
  summary["d"] = cfg.d;
  summary["reps"] = cfg.reps;
  summary["seed"] = cfg.seed;
  summary["n_grid"] = cfg.n_grid;
  if (!cfg.warnings.empty()) summary["warnings"] = cfg.warnings;

  switch (cfg.experiment) {
    case ExperimentKind::Gap: {
      const ConvexBody& body = *cfg.body;
      Window window = cfg.window ? *cfg.window : default_window(body);
      std::string label = body_label(body);
      json points = json::array();
      for (size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        RunPolicy sub = policy;
        sub.stream_base = static_cast<std::uint64_t>(ni) *
                          static_cast<std::uint64_t>(cfg.reps);
        GapEstimate est = estimate_gap(body, cfg.n_grid[ni], cfg.reps, sub, window, quad);
        CampaignRow row = base_row(cfg, label);
        row.n = est.intensity;
        row.mean_gap = est.mean_gap;
        row.stderr_ = est.stderr_;
        row.trunc_count = est.truncation_count;
        out.rows.push_back(row);
        points.push_back(gap_json(est));
      }
      summary["points"] = points;
      check_monotone(out.rows, out);
      out.svg = gap_svg(out.rows, cfg.campaign_id, nullptr);
      break;
    }

    case ExperimentKind::Rate: {
      const ConvexBody& body = *cfg.body;
      Window window = cfg.window ? *cfg.window : default_window(body);
      std::string label = body_label(body);
      RateCampaignResult result =
          rate_campaign(body, cfg.n_grid, cfg.reps, policy, window, quad);
      json points = json::array();
      for (const GapEstimate& est : result.estimates) {
        CampaignRow row = base_row(cfg, label);
        row.n = est.intensity;
        row.mean_gap = est.mean_gap;
        row.stderr_ = est.stderr_;
        row.trunc_count = est.truncation_count;
        out.rows.push_back(row);
        points.push_back(gap_json(est));
      }
      summary["points"] = points;
      summary["fit"] = json{{"slope", result.fit.slope},
                            {"intercept", result.fit.intercept},
                            {"slope_ci_lo", result.fit.slope_ci_lo},
                            {"slope_ci_hi", result.fit.slope_ci_hi},
                            {"residuals", result.fit.residuals}};
      check_monotone(out.rows, out);
      if (!(result.fit.slope < 0.0)) {
        out.checks_passed = false;
        out.check_messages.push_back("fitted slope is not negative: " +
                                     g6(result.fit.slope));
      }
      out.svg = gap_svg(out.rows, cfg.campaign_id, &result.fit);
      break;
    }

    case ExperimentKind::Equiv: {
      static const char* kTag[] = {"hyperplane", "marks", "polar"};
      json blocks = json::array();
      for (double n : cfg.n_grid) {
        EquivalenceReport rep = equivalence_suite(cfg.d, n, cfg.r, cfg.reps, policy);
        for (size_t c = 0; c < rep.samples.size(); ++c) {
          CampaignRow row = base_row(cfg, std::string("ball+") + kTag[c]);
          row.n = n;
          row.mean_gap = rep.samples[c].mean_gap;
          row.stderr_ = rep.samples[c].stderr_;
          row.trunc_count = rep.samples[c].truncation_count;
          out.rows.push_back(row);
        }
        json block;
        block["n"] = n;
        block["r"] = rep.r;
        block["means_compatible"] = rep.means_compatible;
        json kw = json::array(), kc = json::array();
        static const char* kPair[] = {"hyperplane/marks", "hyperplane/polar",
                                      "marks/polar"};
        for (size_t p = 0; p < rep.ks_width.size(); ++p) {
          json jw = ks_json(rep.ks_width[p]);
          jw["pair"] = kPair[p];
          kw.push_back(jw);
          json jc = ks_json(rep.ks_circumradius[p]);
          jc["pair"] = kPair[p];
          kc.push_back(jc);
          if (rep.ks_width[p].p_value < 0.01 || rep.ks_circumradius[p].p_value < 0.01) {
            out.checks_passed = false;
            out.check_messages.push_back("KS rejects construction equivalence (" +
                                         std::string(kPair[p]) + ") at n=" + g6(n));
          }
        }
        block["ks_width"] = kw;
        block["ks_circumradius"] = kc;
        blocks.push_back(block);
        if (!rep.means_compatible) {
          out.checks_passed = false;
          out.check_messages.push_back("construction means differ beyond 3 sigma at n=" +
                                       g6(n));
        }
      }
      summary["equivalence"] = blocks;
      break;
    }

    case ExperimentKind::Concavity: {
      json blocks = json::array();
      for (double n : cfg.n_grid) {
        ConcavityReport rep =
            concavity_suite(*cfg.body, *cfg.body_l, cfg.alphas, n, cfg.reps, policy);
        json alphas = json::array();
        for (const ConcavityAlpha& ca : rep.alphas) {
          CampaignRow row = base_row(cfg, "alpha=" + g6(ca.alpha));
          row.n = n;
          row.mean_gap = ca.mean_margin;
          row.stderr_ = ca.stderr_;
          row.trunc_count = ca.violations;
          out.rows.push_back(row);
          alphas.push_back(json{{"alpha", ca.alpha},
                                {"violations", ca.violations},
                                {"min_margin", ca.min_margin},
                                {"mean_margin", ca.mean_margin},
                                {"stderr", ca.stderr_}});
          if (ca.violations > 0) {
            out.checks_passed = false;
            out.check_messages.push_back("concavity violated at alpha=" + g6(ca.alpha) +
                                         ", n=" + g6(n));
          }
        }
        json block;
        block["n"] = n;
        block["t_max"] = rep.t_max;
        block["delta_kl"] = rep.delta_kl;
        block["alphas"] = alphas;
        block["contraction_violations"] = rep.contraction_violations;
        block["contraction_max_ratio"] = rep.contraction_max_ratio;
        blocks.push_back(block);
        if (rep.contraction_violations > 0) {
          out.checks_passed = false;
          out.check_messages.push_back("Hausdorff contraction bound violated at n=" +
                                       g6(n));
        }
      }
      summary["concavity"] = blocks;
      break;
    }

    case ExperimentKind::Tail: {
      TailReport rep = tail_suite(*cfg.body, cfg.n_grid, cfg.reps, policy);
      summary["b"] = rep.b;
      json curves = json::array();
      std::vector<PlotSeries> series;
      static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                      "#8c564b", "#e377c2"};
      std::string label = body_label(*cfg.body);
      for (size_t ci = 0; ci < rep.curves.size(); ++ci) {
        const TailCurve& c = rep.curves[ci];
        CampaignRow row = base_row(cfg, label);
        row.n = c.intensity;
        row.mean_gap = c.decay_rate;
        row.stderr_ = c.decay_rate_se;
        row.trunc_count = c.convexity_violations;
        out.rows.push_back(row);
        curves.push_back(json{{"n", c.intensity},
                              {"x", c.x},
                              {"survival", c.survival},
                              {"surviving", c.surviving},
                              {"decay_rate", c.decay_rate},
                              {"decay_rate_se", c.decay_rate_se},
                              {"convexity_violations", c.convexity_violations}});
        if (c.convexity_violations > 0) {
          out.checks_passed = false;
          out.check_messages.push_back("log survival not convex at n=" +
                                       g6(c.intensity));
        }
        PlotSeries s;
        s.label = "n=" + g6(c.intensity);
        s.color = kColors[ci % 6];
        s.x = c.x;
        s.y = c.survival;
        series.push_back(s);
      }
      summary["curves"] = curves;
      out.svg = render_plot(series, cfg.campaign_id, "excess x",
                            "P(R > b (R_K + x))", false, true,
                            "b " + g6(rep.b));
      break;
    }

    case ExperimentKind::LowerBound: {
      LowerBoundReport rep =
          lowerbound_suite(*cfg.body, cfg.n_grid, cfg.reps, policy, cfg.inflate);
      std::string label = body_label(*cfg.body);
      json points = json::array();
      PlotSeries gap_series, bound_series;
      gap_series.label = "mean gap";
      gap_series.color = "#1f77b4";
      bound_series.label = "lower bound";
      bound_series.color = "#d62728";
      bound_series.draw_points = false;
      for (const LowerBoundPoint& p : rep.points) {
        CampaignRow row = base_row(cfg, label);
        row.n = p.gap.intensity;
        row.mean_gap = p.gap.mean_gap;
        row.stderr_ = p.gap.stderr_;
        row.trunc_count = p.gap.truncation_count;
        out.rows.push_back(row);
        json pj = gap_json(p.gap);
        pj["bound"] = p.bound;
        pj["covered"] = p.covered;
        points.push_back(pj);
        if (!p.covered) {
          out.checks_passed = false;
          out.check_messages.push_back("lower bound not covered at n=" +
                                       g6(p.gap.intensity) + ": mean " +
                                       g6(p.gap.mean_gap) + " vs bound " + g6(p.bound));
        }
        gap_series.x.push_back(p.gap.intensity);
        gap_series.y.push_back(p.gap.mean_gap);
        bound_series.x.push_back(p.gap.intensity);
        bound_series.y.push_back(p.bound);
      }
      summary["inflate"] = rep.inflate;
      summary["points"] = points;
      out.svg = render_plot({gap_series, bound_series}, cfg.campaign_id, "intensity n",
                            "mean width gap", true, true);
      break;
    }
  }

  summary["checks_passed"] = out.checks_passed;
  summary["check_messages"] = out.check_messages;
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

std::string csv_from_rows(const std::vector<CampaignRow>& rows) {
  std::string csv =
      "campaign_id,experiment,d,body,n,reps,mean_gap,stderr,trunc_count,seed\n";
  for (const CampaignRow& r : rows) {
    csv += r.campaign_id + "," + r.experiment + "," + std::to_string(r.d) + "," +
           r.body + "," + g17(r.n) + "," + std::to_string(r.reps) + "," +
           g17(r.mean_gap) + "," + g17(r.stderr_) + "," +
           std::to_string(r.trunc_count) + "," + std::to_string(r.seed) + "\n";
  }
  return csv;
}

void write_campaign_files(const CampaignOutput& out, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(out_dir + "/" + name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_dir + "/" + name);
    f << content;
  };
  write("rows.csv", csv_from_rows(out.rows));
  write("summary.json", out.summary_json);
  if (!out.svg.empty()) write("plot.svg", out.svg);
}

ReplayResult replay_campaign(const CampaignConfig& config, const std::string& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw std::runtime_error("replay: cannot open " + csv_path);
  std::stringstream stored;
  stored << in.rdbuf();

  CampaignOutput fresh = run_campaign(config);
  std::string actual = csv_from_rows(fresh.rows);

  ReplayResult result;
  if (stored.str() == actual) {
    result.identical = true;
    return result;
  }
  std::istringstream a(stored.str()), b(actual);
  std::string la, lb;
  int line = 0;
  for (;;) {
    ++line;
    bool ga = static_cast<bool>(std::getline(a, la));
    bool gb = static_cast<bool>(std::getline(b, lb));
    if (!ga && !gb) break;  // differ only in trailing bytes
    if (!ga || !gb || la != lb) {
      result.first_diff_line = line;
      result.expected_line = ga ? la : "<end of file>";
      result.actual_line = gb ? lb : "<end of file>";
      return result;
    }
  }
  result.first_diff_line = line;
  result.expected_line = "<trailing bytes differ>";
  result.actual_line = "<trailing bytes differ>";
  return result;
}

}  // namespace kcell
