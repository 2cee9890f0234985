#include "doctest.h"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "kcell/errors.hpp"
#include "kcell/experiments.hpp"

using namespace kcell;

TEST_CASE("parallel_for_indexed fills every slot once, any worker count") {
  const int reps = 97;
  for (int workers : {1, 3, 8}) {
    std::vector<int> hits(reps, 0);
    std::atomic<int> calls{0};
    parallel_for_indexed(reps, workers, [&](int r) {
      hits[static_cast<size_t>(r)] += 1;
      calls.fetch_add(1);
    });
    CHECK(calls.load() == reps);
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("parallel_for_indexed reports the first failing replica") {
  auto boom = [](int r) {
    if (r == 3) throw std::runtime_error("replica three");
    if (r == 7) throw std::runtime_error("replica seven");
  };
  for (int workers : {1, 4}) {
    bool caught = false;
    try {
      parallel_for_indexed(10, workers, boom);
    } catch (const std::runtime_error& e) {
      caught = true;
      CHECK(std::string(e.what()) == "replica three");
    }
    CHECK(caught);
  }
}

TEST_CASE("gap estimates are positive, decreasing, and tighten with reps") {
  ConvexBody ball = make_unit_ball(2);
  Window window = default_window(ball);
  const SphericalQuadrature& quad = default_quadrature(2);
  RunPolicy policy{101, 1, 0};

  GapEstimate g64 = estimate_gap(ball, 64.0, 300, policy, window, quad);
  GapEstimate g256 = estimate_gap(ball, 256.0, 300, policy, window, quad);
  CHECK(g64.mean_gap > 0.0);
  CHECK(g256.mean_gap > 0.0);
  CHECK(g256.mean_gap < g64.mean_gap);
  CHECK(g64.truncation_count == 0);

  // sqrt-of-reps law: quadrupling reps halves the standard error, up to
  // sampling noise in the variance estimate itself.
  RunPolicy big = policy;
  big.stream_base = 100000;
  GapEstimate g64_big = estimate_gap(ball, 64.0, 1200, big, window, quad);
  double shrink = g64_big.stderr_ / g64.stderr_;
  CHECK(shrink == doctest::Approx(0.5).epsilon(0.25));
}

TEST_CASE("gap estimates are invariant to worker count and stream placement") {
  ConvexBody ball = make_unit_ball(2);
  Window window = default_window(ball);
  const SphericalQuadrature& quad = default_quadrature(2);
  GapEstimate a = estimate_gap(ball, 50.0, 120, RunPolicy{9, 1, 0}, window, quad);
  GapEstimate b = estimate_gap(ball, 50.0, 120, RunPolicy{9, 5, 0}, window, quad);
  CHECK(a.mean_gap == b.mean_gap);
  CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("a window that truncates cells aborts the estimate") {
  ConvexBody ball = make_unit_ball(2);
  Window tight{Window::Kind::Box, 1.3};
  const SphericalQuadrature& quad = default_quadrature(2);
  // Intensity 3 leaves most cells bigger than the box.
  CHECK_THROWS_AS(estimate_gap(ball, 3.0, 100, RunPolicy{7, 1, 0}, tight, quad),
                  std::runtime_error);
}

TEST_CASE("rate_fit validates its grid") {
  std::vector<GapEstimate> three(3);
  for (int i = 0; i < 3; ++i) {
    three[static_cast<size_t>(i)].intensity = std::pow(2.0, i);
    three[static_cast<size_t>(i)].mean_gap = 1.0;
  }
  CHECK_THROWS_AS(rate_fit(three), DegenerateGrid);

  // Exact power law comes back with the exact exponent.
  std::vector<GapEstimate> grid(5);
  for (int i = 0; i < 5; ++i) {
    double n = 16.0 * std::pow(2.0, i);
    grid[static_cast<size_t>(i)].intensity = n;
    grid[static_cast<size_t>(i)].mean_gap = 3.0 * std::pow(n, -2.0 / 3.0);
  }
  RateFit fit = rate_fit(grid);
  CHECK(fit.slope == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("thinned rate campaign agrees with independent estimates") {
  ConvexBody ball = make_unit_ball(2);
  Window window = default_window(ball);
  const SphericalQuadrature& quad = default_quadrature(2);
  std::vector<double> grid = {16, 32, 64, 128};
  RateCampaignResult rc = rate_campaign(ball, grid, 500, RunPolicy{11, 1, 0},
                                        window, quad);
  REQUIRE(rc.estimates.size() == 4);
  for (size_t i = 1; i < rc.estimates.size(); ++i)
    CHECK(rc.estimates[i].mean_gap < rc.estimates[i - 1].mean_gap);

  GapEstimate solo =
      estimate_gap(ball, 128.0, 500, RunPolicy{12, 1, 0}, window, quad);
  double se = std::sqrt(solo.stderr_ * solo.stderr_ +
                        rc.estimates[3].stderr_ * rc.estimates[3].stderr_);
  CHECK(std::fabs(solo.mean_gap - rc.estimates[3].mean_gap) < 4.0 * se);

  // Same campaign on more workers is bit-identical.
  RateCampaignResult rc3 = rate_campaign(ball, grid, 500, RunPolicy{11, 3, 0},
                                         window, quad);
  for (size_t i = 0; i < rc.estimates.size(); ++i)
    CHECK(rc.estimates[i].mean_gap == rc3.estimates[i].mean_gap);
  CHECK(rc.fit.slope == rc3.fit.slope);
}

TEST_CASE("rate campaign in space works on the same machinery") {
  ConvexBody ball = make_unit_ball(3);
  Window window = default_window(ball);
  const SphericalQuadrature& quad = default_quadrature(3);
  std::vector<double> grid = {16, 32, 64, 128};
  RateCampaignResult rc =
      rate_campaign(ball, grid, 30, RunPolicy{13, 1, 0}, window, quad);
  for (const GapEstimate& e : rc.estimates) CHECK(e.mean_gap > 0.0);
  CHECK(rc.fit.slope < -0.2);
  CHECK(rc.fit.slope > -0.9);
}

TEST_CASE("equivalence suite returns compatible constructions") {
  EquivalenceReport rep = equivalence_suite(2, 40.0, 0.25, 400, RunPolicy{15, 1, 0});
  REQUIRE(rep.samples.size() == 3);
  REQUIRE(rep.ks_width.size() == 3);
  for (const ConstructionSample& s : rep.samples) {
    CHECK(s.widths.size() == 400);
    CHECK(s.mean_gap > 0.0);
  }
  for (const KsResult& ks : rep.ks_width) CHECK(ks.p_value > 0.001);
  CHECK(rep.means_compatible);

  CHECK_THROWS_AS(equivalence_suite(2, 40.0, 1.2, 400, RunPolicy{15, 1, 0}),
                  std::invalid_argument);
}

TEST_CASE("concavity margins never go negative and contraction holds") {
  ConvexBody ball = make_unit_ball(2);
  ConvexBody square = make_unit_cube(2);
  ConcavityReport rep = concavity_suite(ball, square, {0.25, 0.5, 0.75}, 40.0, 150,
                                        RunPolicy{16, 1, 0});
  REQUIRE(rep.alphas.size() == 3);
  for (const ConcavityAlpha& ca : rep.alphas) {
    CHECK(ca.violations == 0);
    CHECK(ca.min_margin >= -1e-9);
    CHECK(ca.mean_margin >= 0.0);
  }
  CHECK(rep.contraction_violations == 0);
  CHECK(rep.contraction_max_ratio <= 1.0);
  CHECK(rep.delta_kl == doctest::Approx(0.5));

  CHECK_THROWS_AS(concavity_suite(ball, make_unit_ball(3), {0.5}, 40.0, 10,
                                  RunPolicy{16, 1, 0}),
                  DimensionError);
  // A segment has no interior, so the contraction radius is undefined.
  ConvexBody segment = make_vpolytope({Vec{-1.0, 0.0}, Vec{1.0, 0.0}});
  CHECK_THROWS_AS(concavity_suite(ball, segment, {0.5}, 40.0, 10, RunPolicy{16, 1, 0}),
                  std::invalid_argument);
}

TEST_CASE("tail curves decay faster at higher intensity") {
  ConvexBody ball = make_unit_ball(2);
  TailReport rep = tail_suite(ball, {32.0, 64.0}, 1500, RunPolicy{17, 1, 0});
  REQUIRE(rep.curves.size() == 2);
  CHECK(rep.b > 1.0);
  for (const TailCurve& c : rep.curves) {
    for (size_t i = 1; i < c.survival.size(); ++i)
      CHECK(c.survival[i] <= c.survival[i - 1]);
    CHECK(c.convexity_violations == 0);
  }
  CHECK(rep.curves[1].decay_rate > rep.curves[0].decay_rate);
}

TEST_CASE("lower bound holds at face value and fails when inflated tenfold") {
  ConvexBody ball = make_unit_ball(2);
  LowerBoundReport fair =
      lowerbound_suite(ball, {16.0, 64.0}, 400, RunPolicy{18, 1, 0}, 1.0);
  REQUIRE(fair.points.size() == 2);
  for (const LowerBoundPoint& p : fair.points) {
    CHECK(p.bound > 0.0);
    CHECK(p.covered);
  }

  LowerBoundReport rigged =
      lowerbound_suite(ball, {16.0, 64.0}, 400, RunPolicy{18, 1, 0}, 10.0);
  for (const LowerBoundPoint& p : rigged.points) CHECK(!p.covered);
}
