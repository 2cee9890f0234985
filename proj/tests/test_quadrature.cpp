#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "kcell/geom.hpp"
#include "kcell/quadrature.hpp"

using namespace kcell;

namespace {

// Spherical average of |<u, e_1>| has the closed form
// Gamma(d/2) / (sqrt(pi) Gamma((d+1)/2)): 2/pi in the plane, 1/2 in space.
double abs_coord_mean(int dim) {
  return std::exp(std::lgamma(dim / 2.0) - std::lgamma((dim + 1) / 2.0)) /
         std::sqrt(M_PI);
}

void check_scheme(const SphericalQuadrature& q, double linear_tol, double abs_tol) {
  double wsum = 0.0;
  for (double w : q.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.nodes.size() == q.weights.size());

  Vec first_moment = Vec::zero(q.dim);
  double abs_first = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    CHECK(q.nodes[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
    first_moment = first_moment + q.nodes[i] * q.weights[i];
    abs_first += q.weights[i] * std::fabs(q.nodes[i][0]);
  }
  // Antipodal node sets integrate linear functions to zero exactly.
  CHECK(first_moment.norm() < linear_tol);
  CHECK(abs_first == doctest::Approx(abs_coord_mean(q.dim)).epsilon(abs_tol));

  // sweep_order is a permutation of the nodes.
  std::vector<int> order = q.sweep_order;
  std::sort(order.begin(), order.end());
  for (size_t i = 0; i < order.size(); ++i) CHECK(order[i] == static_cast<int>(i));
}

}  // namespace

TEST_CASE("uniform angle rule in the plane") {
  check_scheme(SphericalQuadrature::uniform_angles_2d(64), 1e-12, 1e-3);
  check_scheme(SphericalQuadrature::exact_2d(), 1e-12, 1e-5);
}

TEST_CASE("spherical design in space") {
  check_scheme(SphericalQuadrature::spherical_design_3d(500), 1e-10, 2e-3);
  check_scheme(SphericalQuadrature::spherical_design_3d(2048), 1e-10, 1e-3);
}

TEST_CASE("qmc nodes in higher dimension") {
  check_scheme(SphericalQuadrature::qmc(4, 2048), 1e-10, 5e-3);
  check_scheme(SphericalQuadrature::qmc(6, 4096), 1e-10, 5e-3);
}

TEST_CASE("defaults per dimension") {
  CHECK(default_quadrature(2).prefers_exact());
  CHECK(default_quadrature(3).dim == 3);
  CHECK(default_quadrature(5).dim == 5);
  // The shared instance is stable across calls.
  CHECK(&default_quadrature(3) == &default_quadrature(3));
}

TEST_CASE("ball width equals 2 under every scheme") {
  for (int dim : {2, 3, 4}) {
    const SphericalQuadrature& q = default_quadrature(dim);
    double s = 0.0;
    for (size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i];
    CHECK(2.0 * s == doctest::Approx(2.0).epsilon(1e-12));
  }
}
