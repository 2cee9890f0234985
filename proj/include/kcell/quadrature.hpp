#pragma once

#include <vector>

#include "kcell/vec.hpp"

namespace kcell {

// Quadrature over the unit sphere against the *normalized* spherical
// measure: weights sum to 1 and every node set is antipodally symmetric,
// so linear functions integrate to zero exactly.  Mean width is then
// 2 * sum_i w_i h(K, u_i) and the unit ball has mean width 2 in every
// dimension.
struct SphericalQuadrature {
  enum class Scheme { Exact2D, UniformAngles2D, SphericalDesign3D, Qmc };

  Scheme scheme = Scheme::Exact2D;
  int dim = 2;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  // Node visiting order that keeps consecutive directions close on the
  // sphere; warm-started LP sweeps pivot far less in this order.
  std::vector<int> sweep_order;

  // Signals that closed-form width formulas should be preferred over the
  // node sum when the body allows it (polygons, balls, combinations).
  bool prefers_exact() const { return scheme == Scheme::Exact2D; }

  static SphericalQuadrature exact_2d();
  static SphericalQuadrature uniform_angles_2d(int n);
  static SphericalQuadrature spherical_design_3d(int n);
  static SphericalQuadrature qmc(int dim, int n);

  // d=2 -> exact_2d (nodes present for max-type queries), d=3 -> design
  // with 2048 nodes, d>=4 -> QMC with 4096 nodes.
  static SphericalQuadrature default_for(int dim);
};

// Shared immutable instance of default_for(dim); hot loops should not
// rebuild node sets.
const SphericalQuadrature& default_quadrature(int dim);

}  // namespace kcell
