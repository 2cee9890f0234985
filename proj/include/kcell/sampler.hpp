#pragma once

#include <vector>

#include "kcell/geom.hpp"
#include "kcell/rng.hpp"

namespace kcell {

// A mark (u, t) describes the halfspace <x,u> <= h(K,u) + t relative to a
// body fixed by the caller; t is the distance of the hyperplane beyond the
// supporting hyperplane of K in direction u.
struct Mark {
  Direction u;
  double t;
};

// Poisson sample of the hyperplanes that hit the window but miss K, under
// the invariant measure normalized so a hyperplane process of intensity n
// hits a body L with mean n * W(L).  Count is Poisson with mean
// n * (W(window) - W(K)); each plane is (u, tau) with u uniform on the
// sphere and tau uniform on (h(K,u), h(window,u)].  Every plane arrives
// oriented so its lower halfspace contains K.
//
// Throws WindowTooSmall if h(K,u) > h(window,u) for some sampled or probe
// direction.  Callers are expected to center K near the origin first; the
// window is origin-centered by definition.
std::vector<Hyperplane> sample_hyperplanes(const ConvexBody& k, const Window& window,
                                           double intensity, Philox& rng);
// Same, with the body's mean width precomputed by the caller (campaigns
// sample thousands of times around one body).
std::vector<Hyperplane> sample_hyperplanes(const ConvexBody& k, const Window& window,
                                           double intensity, Philox& rng, double w_body);

// Poisson(2 * intensity * t_max) marks with u uniform and t ~ U[0, t_max].
// This is the mark-space process shared by coupled constructions.
std::vector<Mark> sample_marks(int dim, double intensity, double t_max, Philox& rng);

// Poisson sample from the polar-map image of the hyperplane process around
// the unit ball, restricted to the shell {r <= |x| < 1}: the count is
// Poisson with mean 2 * intensity * (1/r - 1), directions are uniform, and
// the radius rho has P(rho <= s) = (1/r - 1/s) / (1/r - 1), the pushforward
// of tau uniform on (1, 1/r].  Requires 0 < r < 1.
std::vector<Vec> sample_kappa0_points(int dim, double intensity, double r, Philox& rng);

// Polar map of a hyperplane avoiding the unit ball: H(u, tau) -> u / tau.
// Throws HitsUnitBall when |tau| <= 1.
Vec pushforward_delta(const Hyperplane& h);

}  // namespace kcell
