#include "kcell/cell.hpp"

#include <algorithm>
#include <cmath>

#include "kcell/errors.hpp"
#include "kcell/quadrature.hpp"

namespace kcell {

Window default_window(const ConvexBody& k) {
  // Box windows make the guarded cell law exact: a hyperplane missing the
  // box cannot cut the cell inside the box, so sampling only box-hitting
  // planes and clipping to the same box loses nothing.
  return Window{Window::Kind::Box, 4.0 * std::max(1.0, circumradius_origin(k))};
}

double guard_half_side(const Window& w) { return w.radius; }

KCell intersect_cell(int dim, const std::vector<Hyperplane>& planes, double guard,
                     CellSource source) {
  if (!(guard > 0.0)) throw std::invalid_argument("guard half-side must be positive");
  KCell cell;
  cell.dim = dim;
  cell.source = source;
  cell.hrep.dim = dim;
  for (const Hyperplane& h : planes) cell.hrep.add(h);
  cell.hrep.merge_near_parallel();
  cell.hrep.add_guard_box(guard);

  if (dim == 2) {
    std::vector<Vec>& poly = cell.polygon;
    poly = {Vec{guard, guard}, Vec{-guard, guard}, Vec{-guard, -guard},
            Vec{guard, -guard}};
    // Cheap redundancy filter: a plane whose offset exceeds the current
    // largest vertex norm cannot cut the polygon.
    double reach = guard * std::sqrt(2.0);
    for (const Hyperplane& h : planes) {
      if (h.offset >= reach) continue;
      size_t before = poly.size();
      clip_polygon_2d(poly, h.normal.vec(), h.offset);
      if (poly.empty())
        throw InfeasibleError("cell clipped away; halfspaces were not oriented");
      if (poly.size() != before) {
        double r2 = 0.0;
        for (const Vec& v : poly) r2 = std::max(r2, v.norm2());
        reach = std::sqrt(r2);
      }
    }
    double lim = guard - 1e-9;
    for (const Vec& v : poly) {
      if (std::fabs(v[0]) >= lim || std::fabs(v[1]) >= lim) {
        cell.truncated = true;
        break;
      }
    }
    return cell;
  }

  SupportSolver solver(cell.hrep);
  for (int i = 0; i < dim && !cell.truncated; ++i) {
    for (double s : {1.0, -1.0}) {
      SupportOutcome out = solver.solve(Vec::axis(dim, i, s));
      if (out.status != LpStatus::Optimal)
        throw std::logic_error("guarded cell reported unbounded");
      if (out.active_guard) {
        cell.truncated = true;
        break;
      }
    }
  }
  return cell;
}

KCell build_kcell(const ConvexBody& k, double intensity, const Window& window,
                  Philox& rng) {
  std::vector<Hyperplane> planes = sample_hyperplanes(k, window, intensity, rng);
  return intersect_cell(k.dim(), planes, guard_half_side(window),
                        CellSource::HyperplaneProcess);
}

KCell build_from_marks(const std::vector<Mark>& marks, const ConvexBody& k,
                       double guard) {
  std::vector<Hyperplane> planes;
  planes.reserve(marks.size());
  for (const Mark& m : marks)
    planes.emplace_back(m.u, support(k, m.u) + m.t);
  return intersect_cell(k.dim(), planes, guard, CellSource::MarkCoupling);
}

KCell build_polar_cell(int dim, double intensity, double r, Philox& rng) {
  std::vector<Vec> points = sample_kappa0_points(dim, intensity, r, rng);
  std::vector<Hyperplane> planes;
  planes.reserve(points.size());
  for (const Vec& x : points) {
    double n = x.norm();
    planes.emplace_back(Direction::unit(x * (1.0 / n)), 1.0 / n);
  }
  return intersect_cell(dim, planes, 1.0 / r, CellSource::PolarPoints);
}

double cell_support(const KCell& cell, const Direction& u) {
  if (cell.dim == 2 && !cell.polygon.empty())
    return polygon_support(cell.polygon, u.vec());
  SupportSolver solver(cell.hrep);
  SupportOutcome out = solver.solve(u.vec());
  if (out.status != LpStatus::Optimal)
    throw std::logic_error("guarded cell reported unbounded");
  return out.value;
}

double cell_circumradius(const KCell& cell) {
  if (cell.dim == 2 && !cell.polygon.empty()) {
    double r2 = 0.0;
    for (const Vec& v : cell.polygon) r2 = std::max(r2, v.norm2());
    return std::sqrt(r2);
  }
  // Node-resolution estimate; adequate for summaries, not used where d=2
  // exactness is required.
  SphericalQuadrature quad = SphericalQuadrature::default_for(cell.dim);
  SupportSolver solver(cell.hrep);
  double best = 0.0;
  for (int idx : quad.sweep_order) {
    SupportOutcome out = solver.solve(quad.nodes[static_cast<size_t>(idx)]);
    if (out.status == LpStatus::Optimal) best = std::max(best, out.value);
  }
  return best;
}

}  // namespace kcell
