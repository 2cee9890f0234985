#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kcell/geom.hpp"
#include "kcell/vec.hpp"

namespace kcell {

// Halfspace representation fed to the LP: rows <x, u_i> <= tau_i with unit
// normals, plus an optional guard box whose facets are flagged so callers
// can tell "support realized on the guard" from genuine constraints.
struct HRep {
  int dim = 2;
  std::vector<Hyperplane> rows;
  std::vector<std::uint8_t> is_guard;  // parallel to rows

  void add(const Hyperplane& h, bool guard = false) {
    rows.push_back(h);
    is_guard.push_back(guard ? 1 : 0);
  }

  // Cube [-half_side, half_side]^dim appended as 2*dim guard rows.
  void add_guard_box(double half_side);

  // Merge constraint pairs whose normals are parallel to within 1e-10
  // radians, keeping the tighter offset.  Opposite normals form slabs and
  // are never merged.
  void merge_near_parallel();

  std::size_t size() const { return rows.size(); }
};

enum class LpStatus { Optimal, Unbounded };

struct SupportOutcome {
  LpStatus status = LpStatus::Optimal;
  double value = 0.0;       // meaningful when Optimal
  bool active_guard = false;  // support attained on a guard facet
};

// Dense simplex solver for max <c,x> s.t. the HRep rows, specialized to
// d <= 6.  The basis is d row indices whose normals are linearly
// independent; Bland's rule on both pivot choices prevents cycling.
//
// Unless the HRep carries its own guard box, a far-away virtual box is
// appended so every LP starts from a known dual-feasible corner; the true
// problem is unbounded exactly when a virtual facet supports the optimum.
//
// solve() warm-starts from the previous optimal basis, which makes sweeps
// over many nearby directions (quadrature nodes) cheap: an unchanged basis
// costs one d x d multiply, a changed one a handful of pivots.
class SupportSolver {
 public:
  explicit SupportSolver(const HRep& rep);

  SupportOutcome solve(const Vec& c);

  // Adds a constraint row without invalidating the current basis; the next
  // solve repairs feasibility with dual simplex steps.
  void add_row(const Hyperplane& h, bool guard = false);

  // Optimal vertex of the last solve (valid when status == Optimal).
  const Vec& last_point() const { return point_; }

  int dim() const { return dim_; }

 private:
  struct Row {
    Vec normal;
    double offset;
    std::uint8_t kind;  // 0 plain, 1 guard, 2 virtual
  };

  void factor_basis();
  bool dual_step(int enter);
  SupportOutcome finish(const Vec& c);

  int dim_;
  std::vector<Row> rows_;
  std::array<int, kMaxDim> basis_{};
  double inv_[kMaxDim][kMaxDim] = {};   // inverse of basis normal matrix
  double y_cache_[kMaxDim] = {};        // multipliers of the current basis
  Vec point_;
  bool have_basis_ = false;
  // point_ is known to satisfy every row; lets a sweep of nearby
  // objectives skip the O(rows) feasibility scan when the basis is still
  // optimal (the vertex does not move between solves).
  bool feasible_point_ = false;
};

// One-shot support query: max <x,u> over the rows.  Throws InfeasibleError
// if the rows have no common point (a logic error for cells).
SupportOutcome support_hrep(const HRep& rep, const Direction& u);

// Vertex cycle (counterclockwise, redundant rows dropped) of a bounded
// 2-D halfspace intersection.  Throws DimensionError unless dim == 2 and
// InfeasibleError on empty input regions; an unbounded region (possible
// only without a guard box) throws std::runtime_error.
std::vector<Vec> polygon_from_halfspaces_2d(const HRep& rep);

// Support of the polar body {y : <y, x_i> <= 1 for all i}: feeds the rows
// x_i / |x_i| with offsets 1 / |x_i| to the same LP.
SupportOutcome polar_support(const std::vector<Vec>& points, const Direction& u);

// Clips a counterclockwise convex cycle by the halfspace <x,u> <= tau in
// place (Sutherland-Hodgman step).  May produce the empty cycle.
void clip_polygon_2d(std::vector<Vec>& poly, const Vec& normal, double offset);

}  // namespace kcell
