#include "kcell/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kcell/errors.hpp"
#include "kcell/support_engine.hpp"

namespace kcell {

namespace {

double node_sum_width(const std::function<double(const Direction&)>& h,
                      const SphericalQuadrature& quad) {
  double s = 0.0;
  for (size_t i = 0; i < quad.nodes.size(); ++i)
    s += quad.weights[i] * h(Direction::unit(quad.nodes[i]));
  return 2.0 * s;
}

// d=2 closed forms: mean width is perimeter / pi for polygons (including
// the degenerate 2L of a segment), and the hull of a ball and an outside
// point is two tangents plus the unexposed arc.
double polygon_width_2d(const std::vector<Vec>& hull) {
  return polygon_perimeter(hull) / M_PI;
}

double ball_point_gain_2d(double radius, double dist) {
  if (dist <= radius) return 0.0;
  return (2.0 / M_PI) *
         (std::sqrt(dist * dist - radius * radius) -
          radius * std::acos(radius / dist));
}

bool exact_width_available(const ConvexBody& body) {
  if (body.as<Ball>()) return true;
  if (const auto* p = body.as<VPolytope>()) return body.dim() == 2 || p->vertices.size() == 1;
  if (const auto* c = body.as<SupportCombo>()) {
    for (const auto& [w, part] : c->parts)
      if (!exact_width_available(*part)) return false;
    return true;
  }
  return false;
}

double exact_width(const ConvexBody& body) {
  if (const auto* b = body.as<Ball>()) return 2.0 * b->radius;
  if (const auto* p = body.as<VPolytope>()) {
    if (p->vertices.size() == 1) return 0.0;
    return polygon_width_2d(convex_hull_2d(p->vertices));
  }
  const auto* c = body.as<SupportCombo>();
  double s = 0.0;
  for (const auto& [w, part] : c->parts) s += w * exact_width(*part);
  return s;
}

}  // namespace

double mean_width(const ConvexBody& body, const SphericalQuadrature& quad) {
  if (quad.prefers_exact() && exact_width_available(body)) return exact_width(body);
  if (const auto* p = body.as<HPolytope>()) {
    HRep rep;
    rep.dim = body.dim();
    for (const Hyperplane& h : p->halfspaces) rep.add(h);
    rep.merge_near_parallel();
    if (body.dim() == 2 && quad.prefers_exact())
      return polygon_width_2d(polygon_from_halfspaces_2d(rep));
    SupportSolver solver(rep);
    double s = 0.0;
    for (int idx : quad.sweep_order) {
      SupportOutcome out = solver.solve(quad.nodes[static_cast<size_t>(idx)]);
      if (out.status != LpStatus::Optimal)
        throw std::runtime_error("mean_width: unbounded polytope");
      s += quad.weights[static_cast<size_t>(idx)] * out.value;
    }
    return 2.0 * s;
  }
  return node_sum_width([&](const Direction& u) { return support(body, u); }, quad);
}

double mean_width(const ConvexBody& body) {
  return mean_width(body, default_quadrature(body.dim()));
}

double mean_width(const KCell& cell, const SphericalQuadrature& quad) {
  if (cell.dim == 2 && !cell.polygon.empty()) {
    if (quad.prefers_exact()) return polygon_width_2d(cell.polygon);
    return node_sum_width(
        [&](const Direction& u) { return polygon_support(cell.polygon, u.vec()); },
        quad);
  }
  SupportSolver solver(cell.hrep);
  double s = 0.0;
  for (int idx : quad.sweep_order) {
    SupportOutcome out = solver.solve(quad.nodes[static_cast<size_t>(idx)]);
    if (out.status != LpStatus::Optimal)
      throw std::logic_error("mean_width: guarded cell reported unbounded");
    s += quad.weights[static_cast<size_t>(idx)] * out.value;
  }
  return 2.0 * s;
}

double mean_width(const KCell& cell) {
  return mean_width(cell, default_quadrature(cell.dim));
}

double separating_measure(const ConvexBody& k, const ConvexBody& l,
                          const SphericalQuadrature& quad) {
  if (k.dim() != l.dim()) throw DimensionError("separating_measure: dim mismatch");
  for (const Vec& u : quad.nodes) {
    Direction dir = Direction::unit(u);
    if (support(k, dir) > support(l, dir) + kGeomTol)
      throw NotNested("separating_measure: K not contained in L");
  }
  return mean_width(l, quad) - mean_width(k, quad);
}

HitFraction separating_fraction_mc(const ConvexBody& k, const ConvexBody& l,
                                   const Window& window, double intensity,
                                   Philox& rng, const SphericalQuadrature& quad) {
  for (const Vec& u : quad.nodes) {
    Direction dir = Direction::unit(u);
    if (support(l, dir) > support(window, dir) + kGeomTol)
      throw WindowTooSmall("separating_fraction_mc: L sticks out of the window");
  }
  std::vector<Hyperplane> planes = sample_hyperplanes(k, window, intensity, rng);
  HitFraction out;
  out.total = planes.size();
  for (const Hyperplane& h : planes)
    if (h.offset <= support(l, h.normal)) ++out.hits;
  if (out.total > 0) {
    double p = static_cast<double>(out.hits) / static_cast<double>(out.total);
    out.estimate = p;
    out.stderr_ = std::sqrt(std::max(p * (1.0 - p), 1e-12) /
                            static_cast<double>(out.total));
  }
  return out;
}

// ---- width gain ----

namespace {

// O(V) exact polygon gain: locate the chain of edges from which x is
// visible; the new perimeter swaps that chain for the two tangent segments.
double polygon_point_gain_2d(const std::vector<Vec>& hull, const Vec& x) {
  size_t n = hull.size();
  if (n == 0) return 0.0;
  if (n == 1) return 2.0 * x.dist(hull[0]) / M_PI;
  if (n == 2) {
    double before = 2.0 * hull[0].dist(hull[1]);
    double after = polygon_perimeter(convex_hull_2d({hull[0], hull[1], x}));
    return std::max(0.0, after - before) / M_PI;
  }
  // Edge i runs hull[i] -> hull[i+1]; x sees it when x lies strictly on its
  // outer side.
  static thread_local std::vector<char> visible;
  visible.assign(n, 0);
  bool any = false, all = true;
  for (size_t i = 0; i < n; ++i) {
    const Vec& a = hull[i];
    const Vec& b = hull[(i + 1) % n];
    bool vis = cross2(b - a, x - a) < 0.0;
    visible[i] = vis;
    any = any || vis;
    all = all && vis;
  }
  if (!any) return 0.0;  // inside (or on the boundary)
  if (all) return 0.0;   // cannot happen for x outside a convex cycle
  // First visible edge after an invisible one starts the chain.
  size_t start = 0;
  for (size_t i = 0; i < n; ++i) {
    if (visible[i] && !visible[(i + n - 1) % n]) {
      start = i;
      break;
    }
  }
  double removed = 0.0;
  size_t i = start;
  while (visible[i]) {
    removed += hull[i].dist(hull[(i + 1) % n]);
    i = (i + 1) % n;
  }
  const Vec& first = hull[start];
  const Vec& last = hull[i];  // end vertex of the visible chain
  double added = x.dist(first) + x.dist(last);
  return std::max(0.0, added - removed) / M_PI;
}

using GainFn = std::function<double(const Vec&)>;

// Exact gain in d=2 for balls and polygons, node sum otherwise.
GainFn make_gain_fn(const ConvexBody& k, const SphericalQuadrature& quad) {
  if (k.dim() == 2 && quad.prefers_exact()) {
    if (const auto* b = k.as<Ball>()) {
      Vec c = b->center;
      double r = b->radius;
      return [c, r](const Vec& x) { return ball_point_gain_2d(r, x.dist(c)); };
    }
    if (const auto* p = k.as<VPolytope>()) {
      auto hull = std::make_shared<std::vector<Vec>>(convex_hull_2d(p->vertices));
      return [hull](const Vec& x) { return polygon_point_gain_2d(*hull, x); };
    }
  }
  const SphericalQuadrature* q = &quad;
  return [&k, q](const Vec& x) {
    double s = 0.0;
    for (size_t i = 0; i < q->nodes.size(); ++i) {
      Direction u = Direction::unit(q->nodes[i]);
      double excess = dot(x, u.vec()) - support(k, u);
      if (excess > 0.0) s += q->weights[i] * excess;
    }
    return 2.0 * s;
  };
}

// Orthonormal basis of the hyperplane through beta*u with normal u.
std::vector<Vec> tangent_basis(const Direction& u) {
  int d = u.dim();
  std::vector<Vec> basis;
  for (int i = 0; i < d && static_cast<int>(basis.size()) < d - 1; ++i) {
    Vec v = Vec::axis(d, i, 1.0);
    v -= dot(v, u.vec()) * u.vec();
    for (const Vec& b : basis) v -= dot(v, b) * b;
    double n = v.norm();
    if (n > 1e-8) basis.push_back(v * (1.0 / n));
  }
  if (static_cast<int>(basis.size()) != d - 1)
    throw std::logic_error("tangent_basis: failed to complete basis");
  return basis;
}

// Convex 1-D minimization by ternary section.
template <class F>
double ternary_min(const F& f, double lo, double hi, int iters, double* arg) {
  for (int it = 0; it < iters; ++it) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2))
      hi = m2;
    else
      lo = m1;
  }
  double mid = 0.5 * (lo + hi);
  if (arg) *arg = mid;
  return f(mid);
}

struct PlaneMin {
  double value = 0.0;
  Vec argmin;
};

// Minimum of a convex gain over the hyperplane <x,u> = beta, searched
// within |s| <= span around the foot point (plus an optional start offset
// in tangent coordinates).
PlaneMin min_gain_on_plane(const GainFn& gain, const Direction& u, double beta,
                           double span, int dim, const Vec* start = nullptr) {
  Vec foot = u.vec() * beta;
  std::vector<Vec> basis = tangent_basis(u);
  PlaneMin out;
  if (dim == 2) {
    const Vec& v = basis[0];
    auto f = [&](double s) { return gain(foot + s * v); };
    double arg = 0.0;
    out.value = ternary_min(f, -span, span, 90, &arg);
    out.argmin = foot + arg * v;
    return out;
  }
  // d >= 3: cyclic coordinate ternary passes; the objective is convex in
  // every line, kinks only slow convergence down.
  Vec s(dim - 1);
  if (start) s = *start;
  auto at = [&](const Vec& coords) {
    Vec x = foot;
    for (int j = 0; j < dim - 1; ++j) x += coords[j] * basis[j];
    return x;
  };
  double val = gain(at(s));
  for (int round = 0; round < 24; ++round) {
    double before = val;
    for (int i = 0; i < dim - 1; ++i) {
      auto f = [&](double si) {
        Vec coords = s;
        coords[i] = si;
        return gain(at(coords));
      };
      double arg = s[i];
      double v2 = ternary_min(f, s[i] - span, s[i] + span, 60, &arg);
      if (v2 < val) {
        val = v2;
        s[i] = arg;
      }
    }
    if (before - val < 1e-10) break;
  }
  out.value = val;
  out.argmin = at(s);
  return out;
}

}  // namespace

double width_gain(const ConvexBody& k, const Vec& x, const SphericalQuadrature& quad) {
  if (x.dim() != k.dim()) throw DimensionError("width_gain: dimension mismatch");
  return make_gain_fn(k, quad)(x);
}

GainMinimum min_gain_on_hyperplane(const ConvexBody& k, const Hyperplane& h,
                                   const SphericalQuadrature& quad) {
  int d = k.dim();
  if (h.normal.dim() != d) throw DimensionError("min_gain_on_hyperplane: dim mismatch");
  // Normalize to the side where K lies strictly below the plane.
  Direction u = h.normal;
  double beta = h.offset;
  if (support(k, u) >= beta - kGeomTol) {
    u = u.flipped();
    beta = -beta;
    if (support(k, u) >= beta - kGeomTol)
      throw HitsBody("min_gain_on_hyperplane: hyperplane touches the body");
  }
  GainFn gain = make_gain_fn(k, quad);
  double span = 8.0 * (circumradius_origin(k) + std::fabs(beta) + 1.0);
  // Eight starts across the search interval; the objective is convex, so
  // this is belt and braces against flat stretches.
  PlaneMin best;
  best.value = HUGE_VAL;
  std::vector<Vec> basis = tangent_basis(u);
  for (int s = 0; s < 8; ++s) {
    double center = -span + (2.0 * span) * (s + 0.5) / 8.0;
    Vec foot = u.vec() * beta;
    PlaneMin local;
    if (d == 2) {
      auto f = [&](double t) { return gain(foot + t * basis[0]); };
      double arg = center;
      local.value = ternary_min(f, center - span / 8.0, center + span / 8.0, 90, &arg);
      local.argmin = foot + arg * basis[0];
    } else {
      Vec s0(d - 1);
      s0[0] = center / 4.0;
      if (d - 1 > 1) s0[1] = (s % 2 ? 1.0 : -1.0) * span / 16.0;
      local = min_gain_on_plane(gain, u, beta, span, d, &s0);
    }
    bool better = local.value < best.value - 1e-6;
    bool tie = std::fabs(local.value - best.value) <= 1e-6 &&
               local.argmin.norm() < best.argmin.norm();
    if (better || tie) best = local;
  }
  // Polish with a full-interval pass (d=2) so a bad start cannot pin us in
  // a sub-bracket.
  if (d == 2) {
    PlaneMin global = min_gain_on_plane(gain, u, beta, span, d);
    if (global.value < best.value - 1e-9 ||
        (std::fabs(global.value - best.value) <= 1e-6 &&
         global.argmin.norm() < best.argmin.norm()))
      best = global;
  }
  return GainMinimum{best.value, best.argmin};
}

namespace {

// Support of K[t] in direction u by bisection on the offset: the plane
// {<x,u> = beta} meets K[t] exactly when the minimal gain on it is <= t
// (the minimal-gain function is nondecreasing in beta past h(K,u)).
double kt_support(const GainFn& gain, const ConvexBody& k, double t,
                  const Direction& u, double h_k, double span, int dim) {
  double lo = h_k;  // gain 0 on the supporting plane
  double step = std::max(0.25 * t + 1e-6, 1e-4);
  double hi = lo + step;
  int guard = 0;
  while (min_gain_on_plane(gain, u, hi, span, dim).value <= t) {
    lo = hi;
    step *= 2.0;
    hi += step;
    if (++guard > 120) throw std::runtime_error("kt_support: expansion failed");
  }
  for (int it = 0; it < 50; ++it) {
    double mid = 0.5 * (lo + hi);
    if (min_gain_on_plane(gain, u, mid, span, dim).value <= t)
      lo = mid;
    else
      hi = mid;
  }
  return lo;  // feasible (inner) value: never overshoots
}

}  // namespace

double kt_mean_width(const ConvexBody& k, double t, const SphericalQuadrature& quad) {
  if (!(t > 0.0)) throw std::invalid_argument("kt_mean_width: t must be positive");
  GainFn gain = make_gain_fn(k, quad);
  int d = k.dim();
  double span = 8.0 * (circumradius_origin(k) + t + 2.0);
  double s = 0.0;
  for (size_t i = 0; i < quad.nodes.size(); ++i) {
    Direction u = Direction::unit(quad.nodes[i]);
    double h_k = support(k, u);
    s += quad.weights[i] * kt_support(gain, k, t, u, h_k, span, d);
  }
  return 2.0 * s;
}

double lower_bound_estimate(const ConvexBody& k, double intensity,
                            const SphericalQuadrature& quad) {
  if (!(intensity > 0.0))
    throw std::invalid_argument("lower_bound_estimate: intensity must be positive");
  double wkt = kt_mean_width(k, 1.0 / intensity, quad);
  double wk = mean_width(k, quad);
  return std::exp(-1.0) * (wkt - wk);
}

}  // namespace kcell
