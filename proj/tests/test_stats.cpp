#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kcell/rng.hpp"
#include "kcell/stats.hpp"

using namespace kcell;

namespace {

// Exact two-sample KS p-value by enumerating every interleaving of the two
// samples (feasible for tiny sizes): the p-value is the fraction of
// rankings whose statistic is at least the observed one.
double ks_p_bruteforce(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  int m = static_cast<int>(a.size()), n = static_cast<int>(b.size());

  auto stat_num = [&](const std::vector<int>& labels) {
    // integer statistic: max |i*n - j*m| over the merged walk
    int i = 0, j = 0, best = 0;
    for (int lab : labels) {
      if (lab == 0) ++i; else ++j;
      best = std::max(best, std::abs(i * n - j * m));
    }
    return best;
  };

  std::vector<int> observed;
  {
    int i = 0, j = 0;
    while (i < m || j < n) {
      if (j >= n || (i < m && a[i] <= b[j])) { observed.push_back(0); ++i; }
      else { observed.push_back(1); ++j; }
    }
  }
  int d_obs = stat_num(observed);

  // Walk all C(m+n, m) label sequences.
  std::vector<int> labels(m + n, 0);
  std::fill(labels.begin() + m, labels.end(), 1);
  std::sort(labels.begin(), labels.end());
  long total = 0, at_least = 0;
  do {
    ++total;
    if (stat_num(labels) >= d_obs) ++at_least;
  } while (std::next_permutation(labels.begin(), labels.end()));
  return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("running statistics match direct formulas") {
  std::vector<double> xs = {1.5, -2.0, 0.25, 4.0, 4.0, -1.0};
  RunningStats rs;
  for (double x : xs) rs.add(x);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (xs.size() - 1);
  CHECK(rs.count() == xs.size());
  CHECK(rs.mean() == doctest::Approx(mean).epsilon(1e-14));
  CHECK(rs.variance() == doctest::Approx(var).epsilon(1e-14));
  CHECK(rs.stderror() == doctest::Approx(std::sqrt(var / xs.size())).epsilon(1e-14));
}

TEST_CASE("kolmogorov survival reference values") {
  CHECK(kolmogorov_sf(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-10));
  CHECK(kolmogorov_sf(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-10));
  CHECK(kolmogorov_sf(2.0) == doctest::Approx(0.0006709252557796953).epsilon(1e-8));
  CHECK(kolmogorov_sf(0.01) == doctest::Approx(1.0));
}

TEST_CASE("exact two-sample KS p-values match enumeration") {
  std::vector<std::pair<std::vector<double>, std::vector<double>>> cases = {
      {{0.1, 0.5, 0.9}, {0.2, 0.4, 0.6, 0.8}},
      {{1.0, 2.0, 3.0, 4.0}, {2.5, 2.6, 2.7}},
      {{-1.0, 0.0, 5.0, 6.0, 7.0}, {1.0, 2.0, 3.0}},
      {{0.05, 0.1, 0.15, 0.2}, {0.3, 0.35, 0.4, 0.45}},  // disjoint supports
  };
  for (const auto& [a, b] : cases) {
    KsResult r = ks_two_sample(a, b);
    CHECK(r.exact);
    CHECK(r.p_value == doctest::Approx(ks_p_bruteforce(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("KS statistic handles ties through block walks") {
  // With heavy ties the walk may only advance on whole blocks.
  std::vector<double> a = {1.0, 1.0, 2.0, 3.0};
  std::vector<double> b = {1.0, 2.0, 2.0, 3.0};
  KsResult r = ks_two_sample(a, b);
  // D = max |F_a - F_b| over jump points: F_a = (.5,.75,1), F_b = (.25,.75,1).
  CHECK(r.statistic == doctest::Approx(0.25));
}

TEST_CASE("KS distinguishes identical from shifted samples") {
  Philox rng = RngStream{61, 0}.open();
  std::vector<double> a, b, c;
  for (int i = 0; i < 500; ++i) {
    a.push_back(rng.gaussian());
    b.push_back(rng.gaussian());
    c.push_back(rng.gaussian() + 1.0);
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-10);

  // Large samples switch to the asymptotic tail.
  std::vector<double> big_a, big_b;
  Philox rng2 = RngStream{61, 1}.open();
  for (int i = 0; i < 1500; ++i) {
    big_a.push_back(rng2.u01());
    big_b.push_back(rng2.u01());
  }
  KsResult r = ks_two_sample(big_a, big_b);
  CHECK(!r.exact);
  CHECK(r.p_value > 0.001);
}

TEST_CASE("incomplete gamma identities") {
  // Q(1, x) = exp(-x) exactly.
  for (double x : {0.1, 1.0, 3.5, 20.0})
    CHECK(gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
  // chi^2 survival with 2 and 4 dof have closed forms.
  for (double x : {0.5, 2.0, 10.0}) {
    CHECK(chi2_sf(x, 2) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
    CHECK(chi2_sf(x, 4) ==
          doctest::Approx(std::exp(-x / 2.0) * (1.0 + x / 2.0)).epsilon(1e-12));
  }
  CHECK(gamma_q(2.5, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("poisson goodness of fit accepts the truth and rejects a lie") {
  Philox rng = RngStream{62, 0}.open();
  std::vector<std::uint64_t> samples;
  for (int i = 0; i < 4000; ++i) samples.push_back(rng.poisson(7.0));
  Gof good = poisson_gof(samples, 7.0);
  CHECK(good.p_value > 0.001);
  Gof bad = poisson_gof(samples, 8.5);
  CHECK(bad.p_value < 1e-6);
}

TEST_CASE("line fit recovers exact coefficients and honest intervals") {
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  std::vector<double> y;
  for (double xi : x) y.push_back(-0.75 * xi + 2.0);
  LineFit exact = fit_line(x, y);
  CHECK(exact.slope == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(exact.intercept == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(exact.slope_se == doctest::Approx(0.0).epsilon(1e-10));
  for (double r : exact.residuals) CHECK(std::fabs(r) < 1e-12);

  // With noise the 95% CI should cover the true slope most of the time.
  Philox rng = RngStream{63, 0}.open();
  int covered = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> yn;
    for (double xi : x) yn.push_back(-0.75 * xi + 2.0 + 0.3 * rng.gaussian());
    LineFit f = fit_line(x, yn);
    if (f.slope_ci_lo <= -0.75 && -0.75 <= f.slope_ci_hi) ++covered;
  }
  // Binomial(200, .95): 5 sigma is about 15.
  CHECK(covered >= 175);
}

TEST_CASE("t quantiles") {
  CHECK(t_quantile_975(1) == doctest::Approx(12.706).epsilon(1e-3));
  CHECK(t_quantile_975(5) == doctest::Approx(2.571).epsilon(1e-3));
  CHECK(t_quantile_975(30) == doctest::Approx(2.042).epsilon(1e-3));
  CHECK(t_quantile_975(1000) == doctest::Approx(1.96).epsilon(1e-2));
}
