#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kcell/cell.hpp"
#include "kcell/functionals.hpp"
#include "kcell/geom.hpp"
#include "kcell/quadrature.hpp"
#include "kcell/stats.hpp"

namespace kcell {

// Replica r always consumes RNG stream stream_base + r derived from the
// master seed, and per-replica results are folded in replica order after
// the parallel section, so output is a function of (seed, reps) alone,
// never of worker count.
struct RunPolicy {
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::uint64_t stream_base = 0;
};

// Runs body(rep) for rep in [0, reps) on `workers` threads; bodies write
// into caller-owned slots indexed by rep.  Rethrows the first replica
// exception (by replica order) after the pool drains.
void parallel_for_indexed(int reps, int workers, const std::function<void(int)>& body);

struct GapEstimate {
  double intensity = 0.0;
  int reps = 0;
  double mean_gap = 0.0;
  double stderr_ = 0.0;  // sample sd / sqrt(reps)
  std::uint64_t truncation_count = 0;
  double wall_time_s = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_ci_lo = 0.0;
  double slope_ci_hi = 0.0;
  std::vector<double> n_grid;
  std::vector<double> residuals;
};

// Mean of W(Z_K) - W(K) over independent cells at one intensity.  Aborts
// (std::runtime_error) if more than 5% of replicas are truncated: that
// means the window policy is inadequate and the estimate would be biased.
GapEstimate estimate_gap(const ConvexBody& k, double intensity, int reps,
                         const RunPolicy& policy, const Window& window,
                         const SphericalQuadrature& quad);

// Log-log OLS of mean_gap against intensity.  Requires >= 4 grid points
// (DegenerateGrid otherwise).
RateFit rate_fit(const std::vector<GapEstimate>& estimates);

// Gap curve over an intensity grid with a thinning coupling: one master
// sample per replica at max(n_grid), each smaller intensity keeps a plane
// with probability n / n_max (one uniform per plane, shared across the
// grid).  Gaps are then monotone along the grid replica by replica, which
// removes most of the comparison noise from the fitted slope.
struct RateCampaignResult {
  std::vector<GapEstimate> estimates;
  RateFit fit;
};
RateCampaignResult rate_campaign(const ConvexBody& k, const std::vector<double>& n_grid,
                                 int reps, const RunPolicy& policy,
                                 const Window& window, const SphericalQuadrature& quad);

// Three constructions of the same cell law around the unit ball (direct
// hyperplanes in a window of radius 1/r, marks with t_max = 1/r - 1, polar
// points in the shell [r,1)) compared by two-sample KS tests on mean width
// and circumradius.
struct ConstructionSample {
  CellSource source = CellSource::HyperplaneProcess;
  std::vector<double> widths;
  std::vector<double> circumradii;
  double mean_gap = 0.0;
  double stderr_ = 0.0;
  std::uint64_t truncation_count = 0;
};

struct EquivalenceReport {
  double intensity = 0.0;
  double r = 0.0;
  int reps = 0;
  std::vector<ConstructionSample> samples;  // hyperplane, marks, polar
  // Pairwise KS p-values in order (0,1), (0,2), (1,2).
  std::vector<KsResult> ks_width;
  std::vector<KsResult> ks_circumradius;
  bool means_compatible = false;  // pairwise |dmean| <= 3 * combined stderr
};

EquivalenceReport equivalence_suite(int dim, double intensity, double r, int reps,
                                    const RunPolicy& policy);

// Coupled-mark comparison of cells around K, L and their Minkowski
// combinations M_alpha = (1-alpha) K + alpha L.  Per shared mark sample the
// cell width must be concave in alpha and the K/L cells must satisfy the
// Hausdorff contraction bound delta(P_K, P_L) <= (rho / r) delta(K, L) with
// rho the larger measured circumradius and r the smaller inradius.
struct ConcavityAlpha {
  double alpha = 0.0;
  std::uint64_t violations = 0;   // margin < -1e-9
  double min_margin = 0.0;        // most negative concavity margin seen
  double mean_margin = 0.0;
  double stderr_ = 0.0;
};

struct ConcavityReport {
  double intensity = 0.0;
  double t_max = 0.0;
  int reps = 0;
  std::vector<ConcavityAlpha> alphas;
  std::uint64_t contraction_violations = 0;
  double contraction_max_ratio = 0.0;  // max over samples of delta / bound
  double delta_kl = 0.0;
};

ConcavityReport concavity_suite(const ConvexBody& k, const ConvexBody& l,
                                const std::vector<double>& alphas, double intensity,
                                int reps, const RunPolicy& policy);

// Circumradius tail: survival of R_o(Z_K) beyond b * (R_o(K) + x) on an x
// grid, per intensity.  b is the median circumradius ratio at the smallest
// intensity, the grid drops points with fewer than 10 surviving samples,
// and an exponential rate is fitted to the log survival.
struct TailCurve {
  double intensity = 0.0;
  std::vector<double> x;
  std::vector<double> survival;
  std::vector<std::uint64_t> surviving;
  double decay_rate = 0.0;  // -slope of log survival vs x
  double decay_rate_se = 0.0;
  std::uint64_t convexity_violations = 0;  // beyond 3 sigma of counting noise
};

struct TailReport {
  double b = 0.0;
  int reps = 0;
  std::vector<TailCurve> curves;
};

TailReport tail_suite(const ConvexBody& k, const std::vector<double>& n_values,
                      int reps, const RunPolicy& policy);

// Planted lower bound check: mean_gap + 3 stderr must cover
// 0.98 * e^{-1} (W(K[1/n]) - W(K)).  `inflate` multiplies the bound and is
// the negative-control knob: at 10x the check must fail.
struct LowerBoundPoint {
  GapEstimate gap;
  double bound = 0.0;
  bool covered = false;
};

struct LowerBoundReport {
  std::vector<LowerBoundPoint> points;
  double inflate = 1.0;
};

LowerBoundReport lowerbound_suite(const ConvexBody& k, const std::vector<double>& n_grid,
                                  int reps, const RunPolicy& policy, double inflate = 1.0);

}  // namespace kcell
