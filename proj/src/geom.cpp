#include "kcell/geom.hpp"

#include <algorithm>
#include <cmath>

#include "kcell/quadrature.hpp"

namespace kcell {

int ConvexBody::dim() const {
  return std::visit(
      [](const auto& b) -> int {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return b.center.dim();
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          return b.vertices.empty() ? 0 : b.vertices.front().dim();
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          return b.interior.dim();
        } else {
          return b.parts.empty() ? 0 : b.parts.front().second->dim();
        }
      },
      rep());
}

ConvexBody make_ball(const Vec& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  return ConvexBody(Ball{center, radius});
}

ConvexBody make_unit_ball(int dim) { return make_ball(Vec::zero(dim), 1.0); }

ConvexBody make_vpolytope(std::vector<Vec> vertices) {
  if (vertices.empty()) throw std::invalid_argument("vpolytope needs vertices");
  int d = vertices.front().dim();
  for (const Vec& v : vertices)
    if (v.dim() != d) throw DimensionError("vpolytope vertices of mixed dimension");
  return ConvexBody(VPolytope{std::move(vertices)});
}

ConvexBody make_cube(int dim, double half_side) {
  std::vector<Vec> vs;
  vs.reserve(1u << dim);
  for (unsigned mask = 0; mask < (1u << dim); ++mask) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = (mask >> i) & 1 ? half_side : -half_side;
    vs.push_back(v);
  }
  return make_vpolytope(std::move(vs));
}

ConvexBody make_unit_cube(int dim) {
  std::vector<Vec> vs;
  vs.reserve(1u << dim);
  for (unsigned mask = 0; mask < (1u << dim); ++mask) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = (mask >> i) & 1 ? 1.0 : 0.0;
    vs.push_back(v);
  }
  return make_vpolytope(std::move(vs));
}

ConvexBody make_hpolytope(std::vector<Hyperplane> halfspaces, Vec interior) {
  for (const Hyperplane& h : halfspaces) {
    if (h.normal.dim() != interior.dim())
      throw DimensionError("hpolytope rows of mixed dimension");
    if (dot(h.normal.vec(), interior) > h.offset + kGeomTol)
      throw std::invalid_argument("hpolytope interior point violates a halfspace");
  }
  return ConvexBody(HPolytope{std::move(halfspaces), std::move(interior)});
}

ConvexBody make_combo(std::vector<std::pair<double, ConvexBody>> parts) {
  if (parts.empty()) throw std::invalid_argument("combo needs at least one part");
  SupportCombo c;
  int d = parts.front().second.dim();
  for (auto& [w, body] : parts) {
    if (w < 0.0) throw std::invalid_argument("combo weights must be >= 0");
    if (body.dim() != d) throw DimensionError("combo parts of mixed dimension");
    c.parts.emplace_back(w, std::make_shared<const ConvexBody>(std::move(body)));
  }
  return ConvexBody(std::move(c));
}

double support(const ConvexBody& body, const Direction& u) {
  return std::visit(
      [&](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return dot(b.center, u.vec()) + b.radius;
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          double best = -HUGE_VAL;
          for (const Vec& v : b.vertices) best = std::max(best, dot(v, u.vec()));
          return best;
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          throw std::logic_error(
              "support(HPolytope): no closed form; use the support engine");
        } else {
          double s = 0.0;
          for (const auto& [w, part] : b.parts) s += w * support(*part, u);
          return s;
        }
      },
      body.rep());
}

ConvexBody translate(const ConvexBody& body, const Vec& t) {
  return std::visit(
      [&](const auto& b) -> ConvexBody {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return ConvexBody(Ball{b.center + t, b.radius});
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          VPolytope p = b;
          for (Vec& v : p.vertices) v += t;
          return ConvexBody(std::move(p));
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          HPolytope p = b;
          for (Hyperplane& h : p.halfspaces) h.offset += dot(h.normal.vec(), t);
          p.interior += t;
          return ConvexBody(std::move(p));
        } else {
          // h(K + t, u) = h(K, u) + <t, u>; shifting one unit-weight part
          // would change the sum, so translate every part by t / total
          // weight to keep the combination's support shifted by <t,u>.
          double total = 0.0;
          for (const auto& [w, part] : b.parts) total += w;
          if (!(total > 0.0)) throw std::invalid_argument("combo with zero total weight");
          SupportCombo c;
          for (const auto& [w, part] : b.parts)
            c.parts.emplace_back(
                w, std::make_shared<const ConvexBody>(translate(*part, t * (1.0 / total))));
          return ConvexBody(std::move(c));
        }
      },
      body.rep());
}

Vec center_point(const ConvexBody& body) {
  return std::visit(
      [](const auto& b) -> Vec {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return b.center;
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          Vec c(b.vertices.front().dim());
          for (const Vec& v : b.vertices) c += v;
          return c * (1.0 / static_cast<double>(b.vertices.size()));
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          return b.interior;
        } else {
          Vec c(b.parts.front().second->dim());
          for (const auto& [w, part] : b.parts) c += w * center_point(*part);
          return c;
        }
      },
      body.rep());
}

double support(const Window& w, const Direction& u) {
  if (w.kind == Window::Kind::Ball) return w.radius;
  double s = 0.0;
  for (int i = 0; i < u.dim(); ++i) s += std::fabs(u[i]);
  return w.radius * s;
}

double mean_width(const Window& w, int dim) {
  if (w.kind == Window::Kind::Ball) return 2.0 * w.radius;
  // E|u_1| for u uniform on S^{d-1} is Gamma(d/2) / (sqrt(pi) Gamma((d+1)/2));
  // the cube's mean width is 2 R d E|u_1|.
  double e_abs = std::exp(std::lgamma(dim / 2.0) - std::lgamma((dim + 1) / 2.0)) /
                 std::sqrt(M_PI);
  return 2.0 * w.radius * dim * e_abs;
}

std::vector<Vec> convex_hull_2d(std::vector<Vec> points) {
  if (points.empty()) return points;
  std::sort(points.begin(), points.end(), [](const Vec& a, const Vec& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Vec& a, const Vec& b) {
                             return a[0] == b[0] && a[1] == b[1];
                           }),
               points.end());
  size_t n = points.size();
  if (n <= 2) return points;

  std::vector<Vec> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 0)
      --k;
    hull[k++] = points[i];
  }
  for (size_t i = n - 1, lo = k + 1; i-- > 0;) {  // upper chain
    while (k >= lo && cross2(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 0)
      --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_perimeter(const std::vector<Vec>& cycle) {
  if (cycle.size() < 2) return 0.0;
  double p = 0.0;
  for (size_t i = 0; i < cycle.size(); ++i)
    p += cycle[i].dist(cycle[(i + 1) % cycle.size()]);
  return p;
}

double polygon_support(const std::vector<Vec>& cycle, const Vec& u) {
  double best = -HUGE_VAL;
  for (const Vec& v : cycle) best = std::max(best, dot(v, u));
  return best;
}

static double point_segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  Vec ab = b - a;
  double len2 = ab.norm2();
  if (len2 <= 0.0) return p.dist(a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return p.dist(a + t * ab);
}

double point_to_polygon_distance(const Vec& p, const std::vector<Vec>& cycle) {
  if (cycle.empty()) return HUGE_VAL;
  if (cycle.size() == 1) return p.dist(cycle[0]);
  bool inside = cycle.size() >= 3;
  double best = HUGE_VAL;
  for (size_t i = 0; i < cycle.size(); ++i) {
    const Vec& a = cycle[i];
    const Vec& b = cycle[(i + 1) % cycle.size()];
    if (inside && cross2(b - a, p - a) < 0.0) inside = false;
    best = std::min(best, point_segment_distance(p, a, b));
  }
  return inside ? 0.0 : best;
}

// ---- Hausdorff distance ----

namespace {

// delta(A,B) = sup_u |h_A(u) - h_B(u)|.  For two polygons the sup is
// attained either at a facet normal of either polygon or along +-(a - b)
// for a vertex pair: on an arc of directions where vertex a supports A and
// vertex b supports B the difference is <a-b, u>, maximized when u aligns
// with a - b.  Enumerating all three families is exact.
std::vector<Vec> support_candidates_2d(const std::vector<Vec>& hull) {
  std::vector<Vec> cand;
  size_t n = hull.size();
  if (n >= 2) {
    for (size_t i = 0; i < n; ++i) {
      Vec e = hull[(i + 1) % n] - hull[i];
      double len = e.norm();
      if (len > 1e-15) cand.push_back(Vec{e[1] / len, -e[0] / len});
    }
  }
  return cand;
}

double hausdorff_polygons_2d(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  std::vector<Vec> dirs = support_candidates_2d(a);
  std::vector<Vec> outb = support_candidates_2d(b);
  dirs.insert(dirs.end(), outb.begin(), outb.end());
  for (const Vec& va : a)
    for (const Vec& vb : b) {
      Vec d = va - vb;
      double len = d.norm();
      if (len > 1e-15) dirs.push_back(d * (1.0 / len));
    }
  if (dirs.empty()) return 0.0;  // both degenerate to the same point
  double best = 0.0;
  for (const Vec& u : dirs) {
    best = std::max(best, std::fabs(polygon_support(a, u) - polygon_support(b, u)));
    best = std::max(best, std::fabs(polygon_support(a, -u) - polygon_support(b, -u)));
  }
  return best;
}

double hausdorff_ball_polygon_2d(const Ball& ball, const std::vector<Vec>& hull) {
  std::vector<Vec> dirs = support_candidates_2d(hull);
  for (const Vec& v : hull) {
    Vec d = v - ball.center;
    double len = d.norm();
    if (len > 1e-15) dirs.push_back(d * (1.0 / len));
  }
  if (dirs.empty()) dirs.push_back(Vec{1.0, 0.0});
  double best = 0.0;
  for (const Vec& u : dirs) {
    double hb = dot(ball.center, u) + ball.radius;
    double hb2 = -dot(ball.center, u) + ball.radius;
    best = std::max(best, std::fabs(hb - polygon_support(hull, u)));
    best = std::max(best, std::fabs(hb2 - polygon_support(hull, -u)));
  }
  return best;
}

std::vector<Vec> vertices_2d(const ConvexBody& body) {
  const auto* p = body.as<VPolytope>();
  if (!p) return {};
  return convex_hull_2d(p->vertices);
}

}  // namespace

double hausdorff_distance(const ConvexBody& a, const ConvexBody& b,
                          const SphericalQuadrature* quad) {
  if (a.dim() != b.dim()) throw DimensionError("hausdorff: dimension mismatch");
  int d = a.dim();
  const auto* ball_a = a.as<Ball>();
  const auto* ball_b = b.as<Ball>();
  if (ball_a && ball_b)
    return ball_a->center.dist(ball_b->center) +
           std::fabs(ball_a->radius - ball_b->radius);
  if (d == 2) {
    std::vector<Vec> va = vertices_2d(a), vb = vertices_2d(b);
    if (!va.empty() && !vb.empty()) return hausdorff_polygons_2d(va, vb);
    if (ball_a && !vb.empty()) return hausdorff_ball_polygon_2d(*ball_a, vb);
    if (ball_b && !va.empty()) return hausdorff_ball_polygon_2d(*ball_b, va);
  }
  SphericalQuadrature fallback;
  if (!quad) {
    fallback = SphericalQuadrature::default_for(d);
    quad = &fallback;
  }
  double best = 0.0;
  for (const Vec& u : quad->nodes) {
    Direction dir = Direction::unit(u);
    best = std::max(best, std::fabs(support(a, dir) - support(b, dir)));
  }
  return best;
}

}  // namespace kcell
