#include "kcell/support_engine.hpp"

#include <algorithm>
#include <cmath>

#include "kcell/errors.hpp"
#include "kcell/quadrature.hpp"

namespace kcell {

namespace {

constexpr double kVirtualBox = 1e8;
constexpr double kYTol = 1e-12;
// Pivot count after which both pivot choices fall back to strict Bland
// order; the plain most-violated rule is faster but only Bland is provably
// cycle-free.
constexpr int kBlandSwitch = 200;

double slack_tol(double offset) { return 1e-9 * (1.0 + std::fabs(offset)); }

}  // namespace

void HRep::add_guard_box(double half_side) {
  for (int i = 0; i < dim; ++i) {
    add(Hyperplane(Direction::unit(Vec::axis(dim, i, 1.0)), half_side), true);
    add(Hyperplane(Direction::unit(Vec::axis(dim, i, -1.0)), half_side), true);
  }
}

void HRep::merge_near_parallel() {
  size_t m = rows.size();
  if (m < 2) return;
  std::vector<int> order(m);
  for (size_t i = 0; i < m; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Vec& ua = rows[a].normal.vec();
    const Vec& ub = rows[b].normal.vec();
    for (int i = 0; i < dim; ++i)
      if (ua[i] != ub[i]) return ua[i] < ub[i];
    return false;
  });
  // Unit normals within 1e-10 radians are within 1e-10 in chord length, so
  // candidates sit next to each other in lexicographic order (first
  // coordinates within 1e-10).  Guard facets are left alone: they carry
  // exact axis normals that the solver's cold start relies on, and a
  // redundant parallel row is harmless.
  std::vector<char> dead(m, 0);
  for (size_t a = 0; a < m; ++a) {
    int i = order[a];
    if (dead[i] || is_guard[i]) continue;
    for (size_t b = a + 1; b < m; ++b) {
      int j = order[b];
      if (rows[j].normal.vec()[0] - rows[i].normal.vec()[0] > 1.5e-10) break;
      if (dead[j] || is_guard[j]) continue;
      if ((rows[i].normal.vec() - rows[j].normal.vec()).norm() <= 1e-10) {
        if (rows[j].offset < rows[i].offset) rows[i].offset = rows[j].offset;
        dead[j] = 1;
      }
    }
  }
  std::vector<Hyperplane> kept_rows;
  std::vector<std::uint8_t> kept_guard;
  kept_rows.reserve(m);
  kept_guard.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    if (!dead[i]) {
      kept_rows.push_back(rows[i]);
      kept_guard.push_back(is_guard[i]);
    }
  }
  rows = std::move(kept_rows);
  is_guard = std::move(kept_guard);
}

SupportSolver::SupportSolver(const HRep& rep) : dim_(rep.dim), point_(rep.dim) {
  if (dim_ < 2 || dim_ > kMaxDim)
    throw DimensionError("support solver: dimension out of range");
  rows_.reserve(rep.rows.size() + 2 * dim_);
  bool guarded = false;
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    rows_.push_back(Row{rep.rows[i].normal.vec(), rep.rows[i].offset,
                        static_cast<std::uint8_t>(rep.is_guard[i] ? 1 : 0)});
    guarded = guarded || rep.is_guard[i];
  }
  // Without a real guard the LP still needs a bounded start: a virtual box
  // far beyond anything a cell can reach.  Finding it active at the optimum
  // is the unboundedness certificate.
  if (!guarded) {
    for (int i = 0; i < dim_; ++i) {
      rows_.push_back(Row{Vec::axis(dim_, i, 1.0), kVirtualBox, 2});
      rows_.push_back(Row{Vec::axis(dim_, i, -1.0), kVirtualBox, 2});
    }
  }
}

void SupportSolver::add_row(const Hyperplane& h, bool guard) {
  if (h.normal.dim() != dim_) throw DimensionError("add_row: dimension mismatch");
  rows_.push_back(Row{h.normal.vec(), h.offset, static_cast<std::uint8_t>(guard ? 1 : 0)});
  // The stored vertex may violate the new row; next solve rescans.
  if (feasible_point_ && dot(h.normal.vec(), point_) > h.offset + slack_tol(h.offset))
    feasible_point_ = false;
}

// Inverts the basis normal matrix by Gauss-Jordan with partial pivoting.
void SupportSolver::factor_basis() {
  double a[kMaxDim][kMaxDim];
  for (int r = 0; r < dim_; ++r) {
    const Vec& n = rows_[static_cast<size_t>(basis_[r])].normal;
    for (int c = 0; c < dim_; ++c) {
      a[r][c] = n[c];
      inv_[r][c] = (r == c) ? 1.0 : 0.0;
    }
  }
  for (int col = 0; col < dim_; ++col) {
    int piv = col;
    for (int r = col + 1; r < dim_; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-13)
      throw std::runtime_error("support solver: singular basis");
    if (piv != col) {
      for (int c = 0; c < dim_; ++c) {
        std::swap(a[piv][c], a[col][c]);
        std::swap(inv_[piv][c], inv_[col][c]);
      }
    }
    double s = 1.0 / a[col][col];
    for (int c = 0; c < dim_; ++c) {
      a[col][c] *= s;
      inv_[col][c] *= s;
    }
    for (int r = 0; r < dim_; ++r) {
      if (r == col) continue;
      double f = a[r][col];
      if (f == 0.0) continue;
      for (int c = 0; c < dim_; ++c) {
        a[r][c] -= f * a[col][c];
        inv_[r][c] -= f * inv_[col][c];
      }
    }
  }
  for (int i = 0; i < dim_; ++i) {
    double x = 0.0;
    for (int j = 0; j < dim_; ++j)
      x += inv_[i][j] * rows_[static_cast<size_t>(basis_[j])].offset;
    point_[i] = x;
  }
}

// One dual simplex pivot bringing the violated row `enter` into the basis.
// Returns false when no leaving row exists, i.e. the LP is infeasible.
bool SupportSolver::dual_step(int enter) {
  const Vec& ae = rows_[static_cast<size_t>(enter)].normal;
  // Coordinates of the entering normal in the basis normals, and the
  // current multipliers; both via the transposed inverse.
  double u[kMaxDim], y[kMaxDim];
  for (int j = 0; j < dim_; ++j) {
    double uj = 0.0;
    for (int i = 0; i < dim_; ++i) uj += inv_[i][j] * ae[i];
    u[j] = uj;
  }
  for (int j = 0; j < dim_; ++j) y[j] = y_cache_[j];
  int leave = -1;
  double best_ratio = HUGE_VAL;
  for (int j = 0; j < dim_; ++j) {
    if (u[j] > 1e-11) {
      double ratio = y[j] / u[j];
      if (ratio < best_ratio - 1e-15 ||
          (ratio < best_ratio + 1e-15 &&
           (leave < 0 || basis_[j] < basis_[leave]))) {
        best_ratio = ratio;
        leave = j;
      }
    }
  }
  if (leave < 0) return false;
  basis_[leave] = enter;
  factor_basis();
  feasible_point_ = false;  // vertex jumped; revalidated by the dual loop
  return true;
}

SupportOutcome SupportSolver::finish(const Vec& c) {
  SupportOutcome out;
  out.status = LpStatus::Optimal;
  out.value = dot(c, point_);
  for (int j = 0; j < dim_; ++j) {
    if (y_cache_[j] > 1e-10) {
      std::uint8_t kind = rows_[static_cast<size_t>(basis_[j])].kind;
      if (kind == 2) {
        out.status = LpStatus::Unbounded;
        out.value = HUGE_VAL;
        return out;
      }
      if (kind == 1) out.active_guard = true;
    }
  }
  return out;
}

SupportOutcome SupportSolver::solve(const Vec& c) {
  if (c.dim() != dim_) throw DimensionError("solve: objective dimension mismatch");
  auto compute_y = [&]() {
    for (int j = 0; j < dim_; ++j) {
      double yj = 0.0;
      for (int i = 0; i < dim_; ++i) yj += inv_[i][j] * c[i];
      y_cache_[j] = yj;
    }
  };

  auto cold_start = [&]() {
    // Guard/virtual box corner aligned with c: axis normals +-e_i give
    // multipliers |c_i| >= 0, i.e. a dual-feasible start.
    for (int i = 0; i < dim_; ++i) {
      double want = c[i] >= 0.0 ? 1.0 : -1.0;
      int found = -1;
      for (size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].kind == 0) continue;
        if (rows_[r].normal[i] * want > 0.999) {
          found = static_cast<int>(r);
          break;
        }
      }
      if (found < 0) throw std::logic_error("support solver: no box row for axis");
      basis_[i] = found;
    }
    factor_basis();
    have_basis_ = true;
  };

  if (!have_basis_) {
    cold_start();
    feasible_point_ = false;
  }
  compute_y();

  bool dual_feasible = true;
  for (int j = 0; j < dim_; ++j)
    if (y_cache_[j] < -kYTol) dual_feasible = false;

  // Sweep fast path: optimal basis from the previous solve is still
  // optimal for the new objective (same vertex, slacks untouched).
  if (dual_feasible && feasible_point_) return finish(c);

  if (!dual_feasible) {
    if (!feasible_point_) {
      // Neither side is usable; restart dual-feasible from the box corner.
      cold_start();
      feasible_point_ = false;
      compute_y();
      dual_feasible = true;
    }
  }

  int pivots = 0;
  if (dual_feasible) {
    // Dual simplex: restore primal feasibility while keeping y >= 0.
    for (;;) {
      int enter = -1;
      double worst = 0.0;
      for (size_t r = 0; r < rows_.size(); ++r) {
        double s = rows_[r].offset - dot(rows_[r].normal, point_);
        double tol = slack_tol(rows_[r].offset);
        if (s < -tol) {
          if (pivots >= kBlandSwitch) {
            enter = static_cast<int>(r);
            break;  // Bland: first violated index
          }
          if (s < worst) {
            worst = s;
            enter = static_cast<int>(r);
          }
        }
      }
      if (enter < 0) {
        feasible_point_ = true;
        break;
      }
      if (!dual_step(enter))
        throw InfeasibleError("support solver: infeasible halfspace system");
      compute_y();
      if (++pivots > 10000 + static_cast<int>(rows_.size()) * 50)
        throw std::runtime_error("support solver: pivot limit exceeded");
    }
    return finish(c);
  }

  // Primal simplex from a feasible vertex: drop a negative-multiplier row,
  // walk the improving edge to its blocking row.
  for (;;) {
    compute_y();
    int drop = -1;
    double most_negative = -kYTol;
    for (int j = 0; j < dim_; ++j) {
      if (y_cache_[j] < most_negative) {
        if (pivots >= kBlandSwitch) {
          if (drop < 0 || basis_[j] < basis_[drop]) drop = j;
        } else {
          most_negative = y_cache_[j];
          drop = j;
        }
      }
    }
    if (drop < 0) break;
    Vec w(dim_);
    for (int i = 0; i < dim_; ++i) w[i] = -inv_[i][drop];
    int blocker = -1;
    double t_best = HUGE_VAL;
    for (size_t r = 0; r < rows_.size(); ++r) {
      double adv = dot(rows_[r].normal, w);
      if (adv > 1e-11) {
        double s = rows_[r].offset - dot(rows_[r].normal, point_);
        double t = std::max(0.0, s) / adv;
        if (t < t_best - 1e-15 ||
            (t < t_best + 1e-15 &&
             (blocker < 0 || static_cast<int>(r) < blocker))) {
          t_best = t;
          blocker = static_cast<int>(r);
        }
      }
    }
    if (blocker < 0)
      throw std::runtime_error("support solver: unbounded edge without box");
    basis_[drop] = blocker;
    factor_basis();
    if (++pivots > 10000 + static_cast<int>(rows_.size()) * 50)
      throw std::runtime_error("support solver: pivot limit exceeded");
  }
  return finish(c);
}

SupportOutcome support_hrep(const HRep& rep, const Direction& u) {
  HRep copy = rep;
  copy.merge_near_parallel();
  SupportSolver solver(copy);
  return solver.solve(u.vec());
}

void clip_polygon_2d(std::vector<Vec>& poly, const Vec& normal, double offset) {
  static thread_local std::vector<Vec> scratch;
  size_t n = poly.size();
  if (n == 0) return;
  double tol = slack_tol(offset);
  scratch.clear();
  double side_prev = offset - dot(normal, poly[n - 1]);
  const Vec* prev = &poly[n - 1];
  for (size_t i = 0; i < n; ++i) {
    double side = offset - dot(normal, poly[i]);
    bool in_cur = side >= -tol;
    bool in_prev = side_prev >= -tol;
    if (in_prev != in_cur) {
      double denom = side_prev - side;
      if (std::fabs(denom) > 1e-300) {
        double t = side_prev / denom;
        scratch.push_back(*prev + t * (poly[i] - *prev));
      }
    }
    if (in_cur) scratch.push_back(poly[i]);
    side_prev = side;
    prev = &poly[i];
  }
  // Collapse consecutive near-duplicates introduced by tangent cuts.
  poly.clear();
  for (const Vec& v : scratch) {
    if (poly.empty() || (v - poly.back()).norm2() > 1e-24) poly.push_back(v);
  }
  while (poly.size() > 1 && (poly.front() - poly.back()).norm2() <= 1e-24)
    poly.pop_back();
}

std::vector<Vec> polygon_from_halfspaces_2d(const HRep& rep) {
  if (rep.dim != 2) throw DimensionError("polygon_from_halfspaces_2d: dim != 2");
  HRep copy = rep;
  copy.merge_near_parallel();
  bool guarded = false;
  double box = kVirtualBox;
  for (size_t i = 0; i < copy.rows.size(); ++i) guarded = guarded || copy.is_guard[i];
  std::vector<Vec> poly;
  if (guarded) {
    double hx = HUGE_VAL, hy = HUGE_VAL;
    for (size_t i = 0; i < copy.rows.size(); ++i) {
      if (!copy.is_guard[i]) continue;
      const Vec& u = copy.rows[i].normal.vec();
      if (std::fabs(u[0]) > 0.5) hx = std::min(hx, copy.rows[i].offset / std::fabs(u[0]));
      if (std::fabs(u[1]) > 0.5) hy = std::min(hy, copy.rows[i].offset / std::fabs(u[1]));
    }
    if (!std::isfinite(hx) || !std::isfinite(hy))
      throw std::invalid_argument("guard rows do not bound both axes");
    poly = {Vec{hx, hy}, Vec{-hx, hy}, Vec{-hx, -hy}, Vec{hx, -hy}};
  } else {
    poly = {Vec{box, box}, Vec{-box, box}, Vec{-box, -box}, Vec{box, -box}};
  }
  for (size_t i = 0; i < copy.rows.size(); ++i) {
    if (guarded && copy.is_guard[i]) continue;  // already the starting box
    clip_polygon_2d(poly, copy.rows[i].normal.vec(), copy.rows[i].offset);
    if (poly.empty())
      throw InfeasibleError("polygon_from_halfspaces_2d: empty intersection");
  }
  if (!guarded) {
    for (const Vec& v : poly)
      if (std::max(std::fabs(v[0]), std::fabs(v[1])) > 0.5 * kVirtualBox)
        throw std::runtime_error("polygon_from_halfspaces_2d: unbounded region");
  }
  return poly;
}

SupportOutcome polar_support(const std::vector<Vec>& points, const Direction& u) {
  HRep rep;
  rep.dim = u.dim();
  for (const Vec& x : points) {
    double n = x.norm();
    if (n > 1e-14)
      rep.add(Hyperplane(Direction::unit(x * (1.0 / n)), 1.0 / n));
    // The origin contributes <y,0> <= 1: no constraint.
  }
  SupportSolver solver(rep);
  return solver.solve(u.vec());
}

// ---- circumradius / inradius (declared in geom.hpp) ----

namespace {

// Directional extremum of a support-like function over the sphere: node
// scan plus golden-section refinement around the best node (d=2) or a few
// rounds of local tangent probing (d>=3).
template <class F>
double directional_extreme_2d(const F& h, bool maximize) {
  int n = 4096;
  double best = maximize ? -HUGE_VAL : HUGE_VAL;
  int arg = 0;
  for (int k = 0; k < n; ++k) {
    double a = (k + 0.5) * 2.0 * M_PI / n;
    double v = h(Vec{std::cos(a), std::sin(a)});
    if (maximize ? v > best : v < best) {
      best = v;
      arg = k;
    }
  }
  double lo = (arg - 0.5) * 2.0 * M_PI / n;
  double hi = (arg + 1.5) * 2.0 * M_PI / n;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  auto eval = [&](double a) { return h(Vec{std::cos(a), std::sin(a)}); };
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 80; ++it) {
    bool pick1 = maximize ? f1 > f2 : f1 < f2;
    if (pick1) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = eval(x2);
    }
  }
  double mid = eval(0.5 * (lo + hi));
  return maximize ? std::max(best, mid) : std::min(best, mid);
}

template <class F>
double directional_extreme(int dim, const F& h, bool maximize) {
  if (dim == 2) return directional_extreme_2d(h, maximize);
  SphericalQuadrature quad = SphericalQuadrature::default_for(dim);
  double best = maximize ? -HUGE_VAL : HUGE_VAL;
  Vec arg = quad.nodes.front();
  for (const Vec& u : quad.nodes) {
    double v = h(u);
    if (maximize ? v > best : v < best) {
      best = v;
      arg = u;
    }
  }
  // Local refinement: coordinate probes around the best node with a
  // shrinking step, reprojected to the sphere.
  double step = 0.05;
  for (int round = 0; round < 40; ++round) {
    bool improved = false;
    for (int i = 0; i < dim; ++i) {
      for (double s : {step, -step}) {
        Vec cand = arg;
        cand[i] += s;
        double nn = cand.norm();
        if (nn < 1e-12) continue;
        cand *= 1.0 / nn;
        double v = h(cand);
        if (maximize ? v > best : v < best) {
          best = v;
          arg = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (step < 1e-10) break;
  }
  return best;
}

}  // namespace

double circumradius_origin(const ConvexBody& body) {
  if (const auto* b = body.as<Ball>()) return b->center.norm() + b->radius;
  if (const auto* p = body.as<VPolytope>()) {
    double best = 0.0;
    for (const Vec& v : p->vertices) best = std::max(best, v.norm());
    return best;
  }
  if (const auto* p = body.as<HPolytope>()) {
    HRep rep;
    rep.dim = body.dim();
    for (const Hyperplane& h : p->halfspaces) rep.add(h);
    rep.merge_near_parallel();
    SupportSolver solver(rep);
    return directional_extreme(rep.dim, [&](const Vec& u) {
      SupportOutcome out = solver.solve(u);
      if (out.status != LpStatus::Optimal)
        throw std::runtime_error("circumradius_origin: unbounded polytope");
      return out.value;
    }, true);
  }
  return directional_extreme(body.dim(), [&](const Vec& u) {
    return support(body, Direction::unit(u));
  }, true);
}

double inradius_origin(const ConvexBody& body) {
  if (const auto* b = body.as<Ball>()) return b->radius - b->center.norm();
  if (const auto* p = body.as<HPolytope>()) {
    double best = HUGE_VAL;
    for (const Hyperplane& h : p->halfspaces) best = std::min(best, h.offset);
    return best;
  }
  if (body.dim() == 2) {
    if (const auto* p = body.as<VPolytope>()) {
      std::vector<Vec> hull = convex_hull_2d(p->vertices);
      if (hull.size() < 3) return 0.0;
      double best = HUGE_VAL;
      for (size_t i = 0; i < hull.size(); ++i) {
        Vec e = hull[(i + 1) % hull.size()] - hull[i];
        double len = e.norm();
        if (len < 1e-15) continue;
        Vec nrm{e[1] / len, -e[0] / len};
        best = std::min(best, dot(nrm, hull[i]));
      }
      return best;
    }
  }
  return directional_extreme(body.dim(), [&](const Vec& u) {
    return support(body, Direction::unit(u));
  }, false);
}

}  // namespace kcell
