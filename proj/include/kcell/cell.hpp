#pragma once

#include <vector>

#include "kcell/geom.hpp"
#include "kcell/rng.hpp"
#include "kcell/sampler.hpp"
#include "kcell/support_engine.hpp"

namespace kcell {

enum class CellSource { HyperplaneProcess, MarkCoupling, PolarPoints };

// Zero cell realization: the intersection of all sampled halfspaces around
// the body, clipped to a guard box.  `truncated` records whether the guard
// actually shaved the cell; truncated realizations stay in the sample (the
// guard is part of the observation window), they are merely counted.
struct KCell {
  HRep hrep;
  bool truncated = false;
  CellSource source = CellSource::HyperplaneProcess;
  int dim = 2;
  // Vertex cycle, filled only in d=2 where the cell is clipped exactly.
  std::vector<Vec> polygon;
};

// Window policy used by experiments: radius 4 * max(1, R_o(K)).  Keeps the
// truncation probability negligible for intensities >= 16 while the LPs
// stay well-scaled.
Window default_window(const ConvexBody& k);

// Guard box half-side matching a window (the box that circumscribes it).
double guard_half_side(const Window& w);

// Intersect oriented halfspaces into a cell.  d=2 computes the vertex
// cycle; d>=3 leaves the HRep for the support engine.  `truncated` is
// exact in both paths (guard facet active for some axis direction).
KCell intersect_cell(int dim, const std::vector<Hyperplane>& planes, double guard,
                     CellSource source);

// Cell of the hyperplane process around K at the given intensity.
KCell build_kcell(const ConvexBody& k, double intensity, const Window& window,
                  Philox& rng);

// Cell built from shared marks: each (u,t) contributes <x,u> <= h(K,u)+t.
// Marks with t <= t_max pair with a window of support h(K,u) + t_max; the
// guard box covers that window.
KCell build_from_marks(const std::vector<Mark>& marks, const ConvexBody& k,
                       double guard);

// Polar construction around the unit ball: each sampled point x yields the
// halfspace <y, x> <= 1, i.e. the hyperplane H(x/|x|, 1/|x|).  Guard box
// half-side 1/r matches the window of the equivalent hyperplane process.
KCell build_polar_cell(int dim, double intensity, double r, Philox& rng);

// Support of the cell in direction u (exact; uses the polygon in d=2).
double cell_support(const KCell& cell, const Direction& u);

// Largest vertex norm in d=2; in d>=3 a refined maximum of support values
// over quadrature directions (an upper-accurate estimate, not exact).
double cell_circumradius(const KCell& cell);

}  // namespace kcell
