#include "kcell/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kcell {

namespace {

// Order nodes into latitude bands swept in alternating longitude, so a
// warm-started LP visits neighbors instead of jumping across the sphere.
std::vector<int> snake_order_3d(const std::vector<Vec>& nodes) {
  int n = static_cast<int>(nodes.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  int bands = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
  auto band_of = [&](int i) {
    double z = std::clamp(nodes[i][2], -1.0, 1.0);
    int b = static_cast<int>((z + 1.0) / 2.0 * bands);
    return std::min(b, bands - 1);
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    int ba = band_of(a), bb = band_of(b);
    if (ba != bb) return ba < bb;
    double pa = std::atan2(nodes[a][1], nodes[a][0]);
    double pb = std::atan2(nodes[b][1], nodes[b][0]);
    if (ba & 1) return pa > pb;
    return pa < pb;
  });
  return order;
}

// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9
// relative error); only used to turn low-discrepancy uniforms into QMC
// sphere points, far from any accuracy-critical path.
double inverse_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > phigh) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

}  // namespace

SphericalQuadrature SphericalQuadrature::uniform_angles_2d(int n) {
  if (n < 4) throw std::invalid_argument("uniform_angles_2d: need n >= 4");
  if (n % 2) ++n;  // antipodal symmetry needs an even count
  SphericalQuadrature q;
  q.scheme = Scheme::UniformAngles2D;
  q.dim = 2;
  q.nodes.reserve(n);
  q.weights.assign(n, 1.0 / n);
  for (int k = 0; k < n; ++k) {
    double a = (k + 0.5) * 2.0 * M_PI / n;
    q.nodes.push_back(Vec{std::cos(a), std::sin(a)});
  }
  q.sweep_order.resize(n);
  for (int i = 0; i < n; ++i) q.sweep_order[i] = i;  // already angular order
  return q;
}

SphericalQuadrature SphericalQuadrature::exact_2d() {
  SphericalQuadrature q = uniform_angles_2d(4096);
  q.scheme = Scheme::Exact2D;
  return q;
}

SphericalQuadrature SphericalQuadrature::spherical_design_3d(int n) {
  if (n < 8) throw std::invalid_argument("spherical_design_3d: need n >= 8");
  if (n % 2) ++n;
  int half = n / 2;
  SphericalQuadrature q;
  q.scheme = Scheme::SphericalDesign3D;
  q.dim = 3;
  q.nodes.reserve(n);
  q.weights.assign(n, 1.0 / n);
  // Fibonacci spiral on the upper hemisphere, mirrored to make the set
  // exactly antipodal (so linear functions integrate to zero).
  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
  for (int j = 0; j < half; ++j) {
    double z = (j + 0.5) / half;  // (0, 1)
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = j * golden_angle;
    Vec u{rho * std::cos(phi), rho * std::sin(phi), z};
    q.nodes.push_back(u);
    q.nodes.push_back(-u);
  }
  q.sweep_order = snake_order_3d(q.nodes);
  return q;
}

SphericalQuadrature SphericalQuadrature::qmc(int dim, int n) {
  if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("qmc: dim out of range");
  if (n < 8) throw std::invalid_argument("qmc: need n >= 8");
  if (n % 2) ++n;
  static const int bases[] = {2, 3, 5, 7, 11, 13};
  SphericalQuadrature q;
  q.scheme = Scheme::Qmc;
  q.dim = dim;
  q.nodes.reserve(n);
  q.weights.assign(n, 1.0 / n);
  int half = n / 2;
  for (int j = 0; j < half; ++j) {
    Vec g(dim);
    for (int i = 0; i < dim; ++i) {
      double u = halton(j + 1, bases[i]);
      u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
      g[i] = inverse_normal_cdf(u);
    }
    double n2 = g.norm2();
    if (n2 < 1e-24) g[0] = 1.0, n2 = 1.0;
    Vec u = g * (1.0 / std::sqrt(n2));
    q.nodes.push_back(u);
    q.nodes.push_back(-u);
  }
  q.sweep_order.resize(n);
  for (int i = 0; i < n; ++i) q.sweep_order[i] = i;
  return q;
}

SphericalQuadrature SphericalQuadrature::default_for(int dim) {
  if (dim == 2) return exact_2d();
  if (dim == 3) return spherical_design_3d(2048);
  return qmc(dim, 4096);
}

const SphericalQuadrature& default_quadrature(int dim) {
  static const SphericalQuadrature q2 = SphericalQuadrature::default_for(2);
  static const SphericalQuadrature q3 = SphericalQuadrature::default_for(3);
  static const SphericalQuadrature q4 = SphericalQuadrature::default_for(4);
  static const SphericalQuadrature q5 = SphericalQuadrature::default_for(5);
  static const SphericalQuadrature q6 = SphericalQuadrature::default_for(6);
  switch (dim) {
    case 2: return q2;
    case 3: return q3;
    case 4: return q4;
    case 5: return q5;
    default: return q6;
  }
}

}  // namespace kcell
