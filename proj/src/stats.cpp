#include "kcell/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace kcell {

double RunningStats::stderror() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n_));
}

double kolmogorov_sf(double z) {
  if (z <= 0.0) return 1.0;
  if (z < 0.18) return 1.0;  // series needs many terms; sf is 1 to 1e-12 here
  double s = 0.0;
  for (int k = 1; k <= 128; ++k) {
    double term = std::exp(-2.0 * k * k * z * z);
    s += (k % 2 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * s));
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::int64_t m = static_cast<std::int64_t>(a.size());
  const std::int64_t n = static_cast<std::int64_t>(b.size());

  // D as an exact lattice value: max |i n - j m| / (m n) over the merged
  // walk, processing ties in one block.
  std::int64_t d_num = 0;
  {
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      double x;
      if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
        x = a[i];
      else
        x = b[j];
      while (i < a.size() && a[i] == x) ++i;
      while (j < b.size() && b[j] == x) ++j;
      std::int64_t gap = std::llabs(static_cast<std::int64_t>(i) * n -
                                    static_cast<std::int64_t>(j) * m);
      d_num = std::max(d_num, gap);
    }
  }

  KsResult out;
  out.statistic = static_cast<double>(d_num) / static_cast<double>(m * n);

  if (m <= 1000 && n <= 1000) {
    // Exact null: fraction of lattice paths staying strictly inside the
    // band |i n - j m| < d_num, computed in probability form to avoid
    // binomial overflow.
    out.exact = true;
    std::vector<double> prev(static_cast<size_t>(n) + 1, 0.0);
    std::vector<double> cur(static_cast<size_t>(n) + 1, 0.0);
    for (std::int64_t i = 0; i <= m; ++i) {
      for (std::int64_t j = 0; j <= n; ++j) {
        if (i == 0 && j == 0) {
          cur[0] = 1.0;
          continue;
        }
        if (std::llabs(i * n - j * m) >= d_num) {
          cur[static_cast<size_t>(j)] = 0.0;
          continue;
        }
        double t = static_cast<double>(i + j);
        double up = i > 0 ? prev[static_cast<size_t>(j)] * (static_cast<double>(i) / t)
                          : 0.0;
        double left = j > 0
                          ? cur[static_cast<size_t>(j - 1)] * (static_cast<double>(j) / t)
                          : 0.0;
        cur[static_cast<size_t>(j)] = up + left;
      }
      std::swap(prev, cur);
    }
    out.p_value = std::min(1.0, std::max(0.0, 1.0 - prev[static_cast<size_t>(n)]));
    return out;
  }

  double mn = static_cast<double>(m) * static_cast<double>(n);
  double z = out.statistic * std::sqrt(mn / static_cast<double>(m + n));
  out.exact = false;
  out.p_value = kolmogorov_sf(z);
  return out;
}

// Regularized incomplete gamma: series for x < a+1, Lentz continued
// fraction otherwise.
static double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

static double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return std::min(1.0, std::max(0.0, 1.0 - gamma_p_series(a, x)));
  return std::min(1.0, std::max(0.0, gamma_q_cf(a, x)));
}

double chi2_sf(double x, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi2_sf: dof must be positive");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

Gof poisson_gof(const std::vector<std::uint64_t>& samples, double mean) {
  if (samples.empty()) throw std::invalid_argument("poisson_gof: empty sample");
  if (!(mean > 0.0)) throw std::invalid_argument("poisson_gof: mean must be positive");
  std::uint64_t max_k = 0;
  for (std::uint64_t s : samples) max_k = std::max(max_k, s);
  std::vector<double> observed(static_cast<size_t>(max_k) + 1, 0.0);
  for (std::uint64_t s : samples) observed[static_cast<size_t>(s)] += 1.0;

  double reps = static_cast<double>(samples.size());
  // Expected counts reps * pmf(k), with everything past max_k folded into
  // the last bin via the survival mass.
  std::vector<double> expected(observed.size(), 0.0);
  double pmf = std::exp(-mean);
  double cdf = 0.0;
  for (size_t k = 0; k < expected.size(); ++k) {
    if (k > 0) pmf *= mean / static_cast<double>(k);
    expected[k] = reps * pmf;
    cdf += pmf;
  }
  expected.back() += reps * std::max(0.0, 1.0 - cdf);

  // Pool adjacent bins until every expected count reaches 5.
  std::vector<double> obs_pooled, exp_pooled;
  double o_acc = 0.0, e_acc = 0.0;
  for (size_t k = 0; k < expected.size(); ++k) {
    o_acc += observed[k];
    e_acc += expected[k];
    if (e_acc >= 5.0) {
      obs_pooled.push_back(o_acc);
      exp_pooled.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (!exp_pooled.empty()) {
      obs_pooled.back() += o_acc;
      exp_pooled.back() += e_acc;
    } else {
      obs_pooled.push_back(o_acc);
      exp_pooled.push_back(e_acc);
    }
  }

  Gof g;
  g.dof = static_cast<int>(obs_pooled.size()) - 1;
  if (g.dof < 1) {
    g.dof = 0;
    g.p_value = 1.0;
    return g;
  }
  for (size_t i = 0; i < obs_pooled.size(); ++i) {
    double diff = obs_pooled[i] - exp_pooled[i];
    g.statistic += diff * diff / exp_pooled[i];
  }
  g.p_value = chi2_sf(g.statistic, g.dof);
  return g;
}

double t_quantile_975(int dof) {
  static const double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) throw std::invalid_argument("t_quantile_975: dof must be >= 1");
  if (dof <= 30) return table[dof - 1];
  if (dof <= 40) return 2.021;
  if (dof <= 60) return 2.000;
  if (dof <= 120) return 1.980;
  return 1.960;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 paired points");
  size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_line: degenerate x values");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residuals.resize(n);
  double ssr = 0.0;
  for (size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += fit.residuals[i] * fit.residuals[i];
  }
  if (n > 2) {
    double sigma2 = ssr / static_cast<double>(n - 2);
    fit.slope_se = std::sqrt(sigma2 / sxx);
    double tq = t_quantile_975(static_cast<int>(n) - 2);
    fit.slope_ci_lo = fit.slope - tq * fit.slope_se;
    fit.slope_ci_hi = fit.slope + tq * fit.slope_se;
  } else {
    fit.slope_se = 0.0;
    fit.slope_ci_lo = fit.slope_ci_hi = fit.slope;
  }
  return fit;
}

}  // namespace kcell
