#include "kcell/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "kcell/errors.hpp"
#include "kcell/sampler.hpp"
#include "kcell/support_engine.hpp"

namespace kcell {

void parallel_for_indexed(int reps, int workers, const std::function<void(int)>& body) {
  if (reps <= 0) return;
  workers = std::max(1, std::min(workers, reps));
  if (workers == 1) {
    for (int r = 0; r < reps; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(reps));
  auto drain = [&]() {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        body(r);
      } catch (...) {
        errors[static_cast<size_t>(r)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

ConvexBody centered(const ConvexBody& k) {
  Vec c = center_point(k);
  if (c.norm() <= 1e-15) return k;
  return translate(k, -c);
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CellSummary {
  double width = 0.0;
  double circumradius = 0.0;
  bool truncated = false;
};

}  // namespace

GapEstimate estimate_gap(const ConvexBody& k, double intensity, int reps,
                         const RunPolicy& policy, const Window& window,
                         const SphericalQuadrature& quad) {
  if (reps < 1) throw std::invalid_argument("estimate_gap: reps must be >= 1");
  ConvexBody body = centered(k);
  double w_body = mean_width(body, quad);
  double w_body_exact = mean_width(body);
  double guard = guard_half_side(window);
  auto t0 = std::chrono::steady_clock::now();

  std::vector<double> gaps(static_cast<size_t>(reps));
  std::vector<char> truncated(static_cast<size_t>(reps));
  parallel_for_indexed(reps, policy.workers, [&](int rep) {
    Philox rng =
        RngStream{policy.master_seed, policy.stream_base + static_cast<std::uint64_t>(rep)}
            .open();
    std::vector<Hyperplane> planes =
        sample_hyperplanes(body, window, intensity, rng, w_body_exact);
    KCell cell = intersect_cell(body.dim(), planes, guard, CellSource::HyperplaneProcess);
    gaps[static_cast<size_t>(rep)] = mean_width(cell, quad) - w_body;
    truncated[static_cast<size_t>(rep)] = cell.truncated ? 1 : 0;
  });

  GapEstimate est;
  est.intensity = intensity;
  est.reps = reps;
  RunningStats stats;
  for (int r = 0; r < reps; ++r) {
    stats.add(gaps[static_cast<size_t>(r)]);
    est.truncation_count += truncated[static_cast<size_t>(r)];
  }
  est.mean_gap = stats.mean();
  est.stderr_ = stats.stderror();
  est.wall_time_s = elapsed_s(t0);
  if (static_cast<double>(est.truncation_count) > 0.05 * reps)
    throw std::runtime_error("estimate_gap: window truncates more than 5% of cells");
  return est;
}

RateFit rate_fit(const std::vector<GapEstimate>& estimates) {
  if (estimates.size() < 4)
    throw DegenerateGrid("rate_fit: need at least 4 grid points");
  std::vector<double> lx, ly;
  for (const GapEstimate& e : estimates) {
    if (!(e.intensity > 0.0) || !(e.mean_gap > 0.0))
      throw DegenerateGrid("rate_fit: nonpositive intensity or gap");
    lx.push_back(std::log(e.intensity));
    ly.push_back(std::log(e.mean_gap));
  }
  for (size_t i = 1; i < lx.size(); ++i)
    if (lx[i] <= lx[i - 1]) throw DegenerateGrid("rate_fit: grid must increase");
  LineFit lf = fit_line(lx, ly);
  RateFit rf;
  rf.slope = lf.slope;
  rf.intercept = lf.intercept;
  rf.slope_ci_lo = lf.slope_ci_lo;
  rf.slope_ci_hi = lf.slope_ci_hi;
  rf.residuals = lf.residuals;
  for (const GapEstimate& e : estimates) rf.n_grid.push_back(e.intensity);
  return rf;
}

namespace {

// Thinned width trace in d=2: clip planes in increasing-intensity order so
// each plane is clipped exactly once per replica.
void thinned_trace_2d(const std::vector<Hyperplane>& planes,
                      const std::vector<double>& keep_u,
                      const std::vector<double>& n_grid, double n_max, double guard,
                      double w_body, std::vector<double>& gap_out,
                      std::vector<char>& trunc_out) {
  std::vector<Vec> poly = {Vec{guard, guard}, Vec{-guard, guard}, Vec{-guard, -guard},
                           Vec{guard, -guard}};
  double reach = guard * std::sqrt(2.0);
  double prev_frac = 0.0;
  for (size_t g = 0; g < n_grid.size(); ++g) {
    double frac = n_grid[g] / n_max;
    for (size_t j = 0; j < planes.size(); ++j) {
      if (keep_u[j] <= prev_frac || keep_u[j] > frac) continue;
      if (planes[j].offset >= reach) continue;
      size_t before = poly.size();
      clip_polygon_2d(poly, planes[j].normal.vec(), planes[j].offset);
      if (poly.size() != before) {
        double r2 = 0.0;
        for (const Vec& v : poly) r2 = std::max(r2, v.norm2());
        reach = std::sqrt(r2);
      }
    }
    prev_frac = frac;
    gap_out[g] = polygon_perimeter(poly) / M_PI - w_body;
    double lim = guard - 1e-9;
    bool trunc = false;
    for (const Vec& v : poly)
      if (std::fabs(v[0]) >= lim || std::fabs(v[1]) >= lim) {
        trunc = true;
        break;
      }
    trunc_out[g] = trunc ? 1 : 0;
  }
}

// d >= 3 trace: one warm solver per replica; grid points append their
// newly kept planes and re-sweep the quadrature nodes.
void thinned_trace_lp(int dim, const std::vector<Hyperplane>& planes,
                      const std::vector<double>& keep_u,
                      const std::vector<double>& n_grid, double n_max, double guard,
                      double w_body, const SphericalQuadrature& quad,
                      std::vector<double>& gap_out, std::vector<char>& trunc_out) {
  HRep base;
  base.dim = dim;
  base.add_guard_box(guard);
  SupportSolver solver(base);

  // Redundancy prefilter: a plane whose offset exceeds the circumradius of
  // the current cell cannot cut it, nor any later (smaller) cell, so it is
  // dropped for good.  The bound is refreshed from axis supports after each
  // grid point; cells shrink fast, so most far-out planes retire early.
  auto axis_bound = [&]() {
    double sum2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      double hp = solver.solve(Vec::axis(dim, i, 1.0)).value;
      double hm = solver.solve(Vec::axis(dim, i, -1.0)).value;
      sum2 += std::max(hp, hm) * std::max(hp, hm);
    }
    return std::sqrt(sum2) * (1.0 + 1e-12) + 1e-12;
  };
  double r_bound = guard * std::sqrt(static_cast<double>(dim));

  double prev_frac = 0.0;
  for (size_t g = 0; g < n_grid.size(); ++g) {
    double frac = n_grid[g] / n_max;
    for (size_t j = 0; j < planes.size(); ++j) {
      if (keep_u[j] <= prev_frac || keep_u[j] > frac) continue;
      if (planes[j].offset > r_bound) continue;
      solver.add_row(planes[j]);
    }
    prev_frac = frac;
    r_bound = std::min(r_bound, axis_bound());
    double s = 0.0;
    for (int idx : quad.sweep_order) {
      SupportOutcome out = solver.solve(quad.nodes[static_cast<size_t>(idx)]);
      if (out.status != LpStatus::Optimal)
        throw std::logic_error("thinned_trace_lp: guarded cell unbounded");
      s += quad.weights[static_cast<size_t>(idx)] * out.value;
    }
    gap_out[g] = 2.0 * s - w_body;
    bool trunc = false;
    for (int i = 0; i < dim && !trunc; ++i) {
      for (double sign : {1.0, -1.0}) {
        SupportOutcome out = solver.solve(Vec::axis(dim, i, sign));
        if (out.active_guard) {
          trunc = true;
          break;
        }
      }
    }
    trunc_out[g] = trunc ? 1 : 0;
  }
}

}  // namespace

RateCampaignResult rate_campaign(const ConvexBody& k, const std::vector<double>& n_grid,
                                 int reps, const RunPolicy& policy,
                                 const Window& window, const SphericalQuadrature& quad) {
  if (n_grid.size() < 4) throw DegenerateGrid("rate_campaign: need >= 4 grid points");
  for (size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw DegenerateGrid("rate_campaign: grid must strictly increase");
  if (reps < 2) throw std::invalid_argument("rate_campaign: reps must be >= 2");

  ConvexBody body = centered(k);
  int dim = body.dim();
  double w_quad = mean_width(body, quad);
  double w_exact = mean_width(body);
  double n_max = n_grid.back();
  double guard = guard_half_side(window);
  size_t g_count = n_grid.size();

  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> gaps(static_cast<size_t>(reps) * g_count);
  std::vector<char> trunc(static_cast<size_t>(reps) * g_count);

  parallel_for_indexed(reps, policy.workers, [&](int rep) {
    Philox rng =
        RngStream{policy.master_seed, policy.stream_base + static_cast<std::uint64_t>(rep)}
            .open();
    std::vector<Hyperplane> planes =
        sample_hyperplanes(body, window, n_max, rng, w_exact);
    std::vector<double> keep_u(planes.size());
    for (double& u : keep_u) u = rng.u01();
    std::vector<double> gap_row(g_count);
    std::vector<char> trunc_row(g_count);
    if (dim == 2)
      thinned_trace_2d(planes, keep_u, n_grid, n_max, guard, w_quad, gap_row, trunc_row);
    else
      thinned_trace_lp(dim, planes, keep_u, n_grid, n_max, guard, w_quad, quad, gap_row,
                       trunc_row);
    for (size_t g = 0; g < g_count; ++g) {
      gaps[static_cast<size_t>(rep) * g_count + g] = gap_row[g];
      trunc[static_cast<size_t>(rep) * g_count + g] = trunc_row[g];
    }
  });
  double wall = elapsed_s(t0);

  RateCampaignResult result;
  for (size_t g = 0; g < g_count; ++g) {
    RunningStats stats;
    std::uint64_t t_count = 0;
    for (int r = 0; r < reps; ++r) {
      stats.add(gaps[static_cast<size_t>(r) * g_count + g]);
      t_count += trunc[static_cast<size_t>(r) * g_count + g];
    }
    GapEstimate est;
    est.intensity = n_grid[g];
    est.reps = reps;
    est.mean_gap = stats.mean();
    est.stderr_ = stats.stderror();
    est.truncation_count = t_count;
    est.wall_time_s = wall / static_cast<double>(g_count);
    if (static_cast<double>(t_count) > 0.05 * reps)
      throw std::runtime_error("rate_campaign: window truncates more than 5% of cells");
    result.estimates.push_back(est);
  }
  result.fit = rate_fit(result.estimates);
  return result;
}

EquivalenceReport equivalence_suite(int dim, double intensity, double r, int reps,
                                    const RunPolicy& policy) {
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("equivalence_suite: need 0 < r < 1");
  if (reps < 8) throw std::invalid_argument("equivalence_suite: reps too small");
  double window_radius = 1.0 / r;
  double t_max = window_radius - 1.0;
  ConvexBody ball = make_unit_ball(dim);
  Window window{Window::Kind::Ball, window_radius};

  EquivalenceReport report;
  report.intensity = intensity;
  report.r = r;
  report.reps = reps;
  report.samples.resize(3);
  report.samples[0].source = CellSource::HyperplaneProcess;
  report.samples[1].source = CellSource::MarkCoupling;
  report.samples[2].source = CellSource::PolarPoints;
  for (ConstructionSample& s : report.samples) {
    s.widths.resize(static_cast<size_t>(reps));
    s.circumradii.resize(static_cast<size_t>(reps));
  }
  std::vector<char> trunc(static_cast<size_t>(reps) * 3);

  parallel_for_indexed(reps, policy.workers, [&](int rep) {
    RngStream stream{policy.master_seed,
                     policy.stream_base + static_cast<std::uint64_t>(rep)};
    for (int c = 0; c < 3; ++c) {
      Philox rng = stream.substream(static_cast<std::uint64_t>(c)).open();
      KCell cell = [&]() {
        switch (c) {
          case 0: {
            std::vector<Hyperplane> planes =
                sample_hyperplanes(ball, window, intensity, rng, 2.0);
            return intersect_cell(dim, planes, window_radius,
                                  CellSource::HyperplaneProcess);
          }
          case 1: {
            std::vector<Mark> marks = sample_marks(dim, intensity, t_max, rng);
            return build_from_marks(marks, ball, window_radius);
          }
          default:
            return build_polar_cell(dim, intensity, r, rng);
        }
      }();
      ConstructionSample& s = report.samples[static_cast<size_t>(c)];
      s.widths[static_cast<size_t>(rep)] = mean_width(cell);
      s.circumradii[static_cast<size_t>(rep)] = cell_circumradius(cell);
      trunc[static_cast<size_t>(rep) * 3 + static_cast<size_t>(c)] =
          cell.truncated ? 1 : 0;
    }
  });

  for (int c = 0; c < 3; ++c) {
    ConstructionSample& s = report.samples[static_cast<size_t>(c)];
    RunningStats stats;
    for (int rep = 0; rep < reps; ++rep) {
      stats.add(s.widths[static_cast<size_t>(rep)] - 2.0);
      s.truncation_count += trunc[static_cast<size_t>(rep) * 3 + static_cast<size_t>(c)];
    }
    s.mean_gap = stats.mean();
    s.stderr_ = stats.stderror();
  }

  report.means_compatible = true;
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      report.ks_width.push_back(
          ks_two_sample(report.samples[a].widths, report.samples[b].widths));
      report.ks_circumradius.push_back(ks_two_sample(report.samples[a].circumradii,
                                                     report.samples[b].circumradii));
      double diff = std::fabs(report.samples[a].mean_gap - report.samples[b].mean_gap);
      double se = std::sqrt(report.samples[a].stderr_ * report.samples[a].stderr_ +
                            report.samples[b].stderr_ * report.samples[b].stderr_);
      if (diff > 3.0 * se) report.means_compatible = false;
    }
  }
  return report;
}

ConcavityReport concavity_suite(const ConvexBody& k, const ConvexBody& l,
                                const std::vector<double>& alphas, double intensity,
                                int reps, const RunPolicy& policy) {
  if (k.dim() != l.dim()) throw DimensionError("concavity_suite: dim mismatch");
  int dim = k.dim();
  ConvexBody kc = centered(k);
  ConvexBody lc = centered(l);
  double r_k = inradius_origin(kc);
  double r_l = inradius_origin(lc);
  if (!(r_k > 0.0) || !(r_l > 0.0))
    throw std::invalid_argument("concavity_suite: bodies must have interior");
  double reach = std::max({1.0, circumradius_origin(kc), circumradius_origin(lc)});
  double t_max = 3.0 * reach;
  double guard = reach + t_max;

  std::vector<ConvexBody> bodies;
  bodies.push_back(kc);
  bodies.push_back(lc);
  for (double a : alphas)
    bodies.push_back(make_combo({{1.0 - a, kc}, {a, lc}}));

  ConcavityReport report;
  report.intensity = intensity;
  report.t_max = t_max;
  report.reps = reps;
  report.delta_kl = hausdorff_distance(kc, lc);
  double r_min = std::min(r_k, r_l);

  size_t n_alpha = alphas.size();
  std::vector<double> margins(static_cast<size_t>(reps) * n_alpha);
  std::vector<double> ratios(static_cast<size_t>(reps));

  parallel_for_indexed(reps, policy.workers, [&](int rep) {
    Philox rng =
        RngStream{policy.master_seed, policy.stream_base + static_cast<std::uint64_t>(rep)}
            .open();
    std::vector<Mark> marks = sample_marks(dim, intensity, t_max, rng);
    std::vector<double> widths(bodies.size());
    std::vector<KCell> cells;
    cells.reserve(bodies.size());
    for (size_t b = 0; b < bodies.size(); ++b) {
      cells.push_back(build_from_marks(marks, bodies[b], guard));
      widths[b] = mean_width(cells[b]);
    }
    for (size_t a = 0; a < n_alpha; ++a) {
      double alpha = alphas[a];
      double lhs = widths[2 + a];
      double rhs = (1.0 - alpha) * widths[0] + alpha * widths[1];
      margins[static_cast<size_t>(rep) * n_alpha + a] = lhs - rhs;
    }
    // Contraction: compare the K and L cells through their polygons.
    if (dim == 2) {
      double delta = hausdorff_distance(make_vpolytope(cells[0].polygon),
                                        make_vpolytope(cells[1].polygon));
      double rho = std::max(cell_circumradius(cells[0]), cell_circumradius(cells[1]));
      double bound = (rho / r_min) * report.delta_kl;
      ratios[static_cast<size_t>(rep)] = bound > 0.0 ? delta / bound : 0.0;
    } else {
      ratios[static_cast<size_t>(rep)] = 0.0;
    }
  });

  report.alphas.resize(n_alpha);
  for (size_t a = 0; a < n_alpha; ++a) {
    ConcavityAlpha& ca = report.alphas[a];
    ca.alpha = alphas[a];
    RunningStats stats;
    ca.min_margin = HUGE_VAL;
    for (int rep = 0; rep < reps; ++rep) {
      double m = margins[static_cast<size_t>(rep) * n_alpha + a];
      stats.add(m);
      ca.min_margin = std::min(ca.min_margin, m);
      if (m < -1e-9) ++ca.violations;
    }
    ca.mean_margin = stats.mean();
    ca.stderr_ = stats.stderror();
  }
  for (int rep = 0; rep < reps; ++rep) {
    double ratio = ratios[static_cast<size_t>(rep)];
    report.contraction_max_ratio = std::max(report.contraction_max_ratio, ratio);
    if (ratio > 1.0 + 1e-9) ++report.contraction_violations;
  }
  return report;
}

TailReport tail_suite(const ConvexBody& k, const std::vector<double>& n_values,
                      int reps, const RunPolicy& policy) {
  if (n_values.empty()) throw std::invalid_argument("tail_suite: empty grid");
  ConvexBody body = centered(k);
  int dim = body.dim();
  double r_o = circumradius_origin(body);
  Window window = default_window(body);
  double guard = guard_half_side(window);
  double w_exact = mean_width(body);

  TailReport report;
  report.reps = reps;
  std::vector<std::vector<double>> radii(n_values.size());

  for (size_t ni = 0; ni < n_values.size(); ++ni) {
    radii[ni].resize(static_cast<size_t>(reps));
    parallel_for_indexed(reps, policy.workers, [&](int rep) {
      Philox rng = RngStream{policy.master_seed,
                             policy.stream_base + static_cast<std::uint64_t>(rep)}
                       .substream(ni)
                       .open();
      std::vector<Hyperplane> planes =
          sample_hyperplanes(body, window, n_values[ni], rng, w_exact);
      KCell cell =
          intersect_cell(dim, planes, guard, CellSource::HyperplaneProcess);
      radii[ni][static_cast<size_t>(rep)] = cell_circumradius(cell);
    });
  }

  // b: median circumradius ratio at the smallest intensity.
  {
    std::vector<double> sorted = radii.front();
    std::sort(sorted.begin(), sorted.end());
    size_t mid = sorted.size() / 2;
    double median = sorted.size() % 2 ? sorted[mid]
                                      : 0.5 * (sorted[mid - 1] + sorted[mid]);
    report.b = median / r_o;
  }

  for (size_t ni = 0; ni < n_values.size(); ++ni) {
    TailCurve curve;
    curve.intensity = n_values[ni];
    std::vector<double> lx, ly;
    for (int gx = 0; gx <= 12; ++gx) {
      double x = 0.025 * gx;
      double threshold = report.b * (r_o + x);
      std::uint64_t surviving = 0;
      for (double rr : radii[ni])
        if (rr > threshold) ++surviving;
      if (surviving < 10) break;  // counting noise would swamp the fit
      double s = static_cast<double>(surviving) / static_cast<double>(reps);
      curve.x.push_back(x);
      curve.survival.push_back(s);
      curve.surviving.push_back(surviving);
      lx.push_back(x);
      ly.push_back(std::log(s));
    }
    if (lx.size() >= 3) {
      LineFit lf = fit_line(lx, ly);
      curve.decay_rate = -lf.slope;
      curve.decay_rate_se = lf.slope_se;
    }
    // Convexity of log survival, allowing 3 sigma of counting noise per
    // triple: Var(log S_hat) ~ (1 - S) / (S * reps).
    for (size_t i = 0; i + 2 < curve.survival.size(); ++i) {
      double l0 = std::log(curve.survival[i]);
      double l1 = std::log(curve.survival[i + 1]);
      double l2 = std::log(curve.survival[i + 2]);
      double var = 0.0;
      for (size_t j = i; j <= i + 2; ++j) {
        double s = curve.survival[j];
        var += (1.0 - s) / (s * static_cast<double>(reps));
      }
      if (l1 > 0.5 * (l0 + l2) + 3.0 * std::sqrt(var)) ++curve.convexity_violations;
    }
    report.curves.push_back(std::move(curve));
  }
  return report;
}

LowerBoundReport lowerbound_suite(const ConvexBody& k, const std::vector<double>& n_grid,
                                  int reps, const RunPolicy& policy, double inflate) {
  if (n_grid.empty()) throw std::invalid_argument("lowerbound_suite: empty grid");
  ConvexBody body = centered(k);
  const SphericalQuadrature& quad = default_quadrature(body.dim());
  Window window = default_window(body);

  LowerBoundReport report;
  report.inflate = inflate;
  for (size_t ni = 0; ni < n_grid.size(); ++ni) {
    RunPolicy sub = policy;
    sub.stream_base = policy.stream_base +
                      static_cast<std::uint64_t>(ni) * static_cast<std::uint64_t>(reps);
    LowerBoundPoint point;
    point.gap = estimate_gap(body, n_grid[ni], reps, sub, window, quad);
    point.bound = lower_bound_estimate(body, n_grid[ni], quad) * inflate;
    point.covered =
        point.gap.mean_gap + 3.0 * point.gap.stderr_ >= 0.98 * point.bound;
    report.points.push_back(point);
  }
  return report;
}

}  // namespace kcell
