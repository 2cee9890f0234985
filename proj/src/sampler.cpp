#include "kcell/sampler.hpp"

#include <cmath>

#include "kcell/errors.hpp"
#include "kcell/functionals.hpp"
#include "kcell/quadrature.hpp"

namespace kcell {

namespace {

// Cheap misconfiguration probe: axis directions plus a fan of coordinate
// plane angles.  The sound guarantee comes later anyway -- every sampled
// direction compares the two supports before drawing an offset.
void check_window_contains(const ConvexBody& k, const Window& window) {
  int d = k.dim();
  auto check = [&](const Vec& v) {
    Direction dir = Direction::unit(v);
    if (support(k, dir) > support(window, dir) + kGeomTol)
      throw WindowTooSmall("body sticks out of the window");
  };
  for (int i = 0; i < d; ++i) {
    check(Vec::axis(d, i, 1.0));
    check(Vec::axis(d, i, -1.0));
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      for (int a = 0; a < 16; ++a) {
        double t = (a + 0.5) * 2.0 * M_PI / 16;
        Vec v(d);
        v[i] = std::cos(t);
        v[j] = std::sin(t);
        check(v);
      }
    }
  }
}

}  // namespace

std::vector<Hyperplane> sample_hyperplanes(const ConvexBody& k, const Window& window,
                                           double intensity, Philox& rng,
                                           double w_body) {
  if (intensity < 0.0) throw std::invalid_argument("intensity must be >= 0");
  int d = k.dim();
  double w_window = mean_width(window, d);
  if (w_body > w_window + kGeomTol)
    throw WindowTooSmall("window mean width below body mean width");
  check_window_contains(k, window);

  double mean = intensity * (w_window - w_body);
  std::uint64_t count = rng.poisson(mean);
  std::vector<Hyperplane> planes;
  planes.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Direction u = Direction::unit(rng.sphere_direction(d));
    double lo = support(k, u);
    double hi = support(window, u);
    if (lo > hi + kGeomTol) throw WindowTooSmall("body sticks out of the window");
    planes.emplace_back(u, rng.uniform(lo, hi));
  }
  return planes;
}

std::vector<Hyperplane> sample_hyperplanes(const ConvexBody& k, const Window& window,
                                           double intensity, Philox& rng) {
  return sample_hyperplanes(k, window, intensity, rng, mean_width(k));
}

std::vector<Mark> sample_marks(int dim, double intensity, double t_max, Philox& rng) {
  if (t_max <= 0.0) throw std::invalid_argument("t_max must be positive");
  if (intensity < 0.0) throw std::invalid_argument("intensity must be >= 0");
  std::uint64_t count = rng.poisson(2.0 * intensity * t_max);
  std::vector<Mark> marks;
  marks.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Direction u = Direction::unit(rng.sphere_direction(dim));
    marks.push_back(Mark{u, rng.uniform(0.0, t_max)});
  }
  return marks;
}

std::vector<Vec> sample_kappa0_points(int dim, double intensity, double r, Philox& rng) {
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("sample_kappa0_points: need 0 < r < 1");
  if (intensity < 0.0) throw std::invalid_argument("intensity must be >= 0");
  double inv_r = 1.0 / r;
  std::uint64_t count = rng.poisson(2.0 * intensity * (inv_r - 1.0));
  std::vector<Vec> pts;
  pts.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Vec u = rng.sphere_direction(dim);
    // Radial density on [r,1) proportional to rho^{-2}: inverse CDF of
    // (1/r - 1/s) / (1/r - 1).
    double s = 1.0 / (inv_r - rng.u01() * (inv_r - 1.0));
    pts.push_back(u * s);
  }
  return pts;
}

Vec pushforward_delta(const Hyperplane& h) {
  if (std::fabs(h.offset) <= 1.0)
    throw HitsUnitBall("pushforward_delta: hyperplane meets the unit ball");
  return h.normal.vec() * (1.0 / h.offset);
}

}  // namespace kcell
