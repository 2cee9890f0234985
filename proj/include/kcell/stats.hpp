#pragma once

#include <cstdint>
#include <vector>

namespace kcell {

// Streaming mean/variance (Welford).  Folding order is fixed by the caller,
// which is what keeps campaign output independent of worker count.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderror() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool exact = false;  // exact permutation-null p (small samples) vs asymptotic
};

// Two-sample Kolmogorov-Smirnov test.  Uses the exact null distribution
// (lattice recursion over the combined order) when m*n is small enough,
// otherwise the asymptotic Kolmogorov tail.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// P(K > z) for the Kolmogorov distribution: 2 * sum_{k>=1} (-1)^{k-1} e^{-2 k^2 z^2}.
double kolmogorov_sf(double z);

// Regularized upper incomplete gamma Q(a, x); chi-square survival is
// Q(dof/2, x/2).
double gamma_q(double a, double x);
double chi2_sf(double x, int dof);

struct Gof {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Chi-square goodness of fit of observed counts against Poisson(mean),
// pooling tail bins until every expected count is >= 5.
Gof poisson_gof(const std::vector<std::uint64_t>& samples, double mean);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double slope_ci_lo = 0.0;
  double slope_ci_hi = 0.0;
  std::vector<double> residuals;
};

// Ordinary least squares y = a + b x with a 95% t confidence interval on
// the slope.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided 97.5% Student t quantile for the given degrees of freedom.
double t_quantile_975(int dof);

}  // namespace kcell
