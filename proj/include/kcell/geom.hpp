#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "kcell/errors.hpp"
#include "kcell/vec.hpp"

namespace kcell {

inline constexpr double kGeomTol = 1e-9;

// Unit vector.  Construction normalizes, so downstream code can rely on
// |u| = 1 to within 1e-12 and support values need no rescaling.
class Direction {
 public:
  explicit Direction(const Vec& v) {
    double n = v.norm();
    if (!(n > 1e-14)) throw std::invalid_argument("Direction: zero vector");
    u_ = v * (1.0 / n);
  }

  // For callers that already produced a unit vector (samplers, axis
  // directions); skips the divide.
  static Direction unit(const Vec& v) {
    Direction d;
    d.u_ = v;
    return d;
  }

  const Vec& vec() const { return u_; }
  int dim() const { return u_.dim(); }
  double operator[](int i) const { return u_[i]; }
  Direction flipped() const { return unit(-u_); }

 private:
  Direction() = default;
  Vec u_;
};

// Hyperplane {x : <x,u> = tau} with lower halfspace {<x,u> <= tau}.
// (u, tau) and (-u, -tau) describe the same hyperplane but opposite
// halfspaces; canonical() picks one representative of the *hyperplane*
// for equality checks.
struct Hyperplane {
  Direction normal;
  double offset;

  Hyperplane(Direction u, double tau) : normal(u), offset(tau) {}

  Hyperplane canonical() const {
    const Vec& u = normal.vec();
    for (int i = 0; i < u.dim(); ++i) {
      if (std::fabs(u[i]) > 1e-12) {
        if (u[i] < 0.0) return Hyperplane(normal.flipped(), -offset);
        return *this;
      }
    }
    return *this;
  }

  bool same_hyperplane(const Hyperplane& o, double tol = kGeomTol) const {
    Hyperplane a = canonical(), b = o.canonical();
    return (a.normal.vec() - b.normal.vec()).norm() <= tol &&
           std::fabs(a.offset - b.offset) <= tol;
  }
};

struct Ball {
  Vec center;
  double radius = 1.0;
};

// Convex hull of a finite point set.  Degenerate sets (a point, a segment)
// are allowed; they matter for width oracles even though cell construction
// requires full-dimensional bodies.
struct VPolytope {
  std::vector<Vec> vertices;
};

// Intersection of halfspaces with a known interior point.  Support values
// come from the support engine, never from this struct directly.
struct HPolytope {
  std::vector<Hyperplane> halfspaces;
  Vec interior;
};

class ConvexBody;

// Minkowski combination sum_i w_i K_i represented through its support
// function h = sum_i w_i h(K_i, .), weights >= 0.
struct SupportCombo {
  std::vector<std::pair<double, std::shared_ptr<const ConvexBody>>> parts;
};

class ConvexBody {
 public:
  using Rep = std::variant<Ball, VPolytope, HPolytope, SupportCombo>;

  ConvexBody(Ball b) : rep_(std::move(b)) {}
  ConvexBody(VPolytope p) : rep_(std::move(p)) {}
  ConvexBody(HPolytope p) : rep_(std::move(p)) {}
  ConvexBody(SupportCombo c) : rep_(std::move(c)) {}

  const Rep& rep() const { return rep_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&rep_);
  }

  int dim() const;

 private:
  Rep rep_;
};

ConvexBody make_ball(const Vec& center, double radius);
ConvexBody make_unit_ball(int dim);
ConvexBody make_vpolytope(std::vector<Vec> vertices);
// Axis-aligned cube [-h, h]^dim as a VPolytope.
ConvexBody make_cube(int dim, double half_side);
// [0,1]^dim; the running example of a polytope with corners away from o.
ConvexBody make_unit_cube(int dim);
ConvexBody make_hpolytope(std::vector<Hyperplane> halfspaces, Vec interior);
ConvexBody make_combo(std::vector<std::pair<double, ConvexBody>> parts);

// Support function h(K, u) = sup{<x,u> : x in K}.  HPolytope has no closed
// form; asking for it here is a contract violation (route through the
// support engine instead).
double support(const ConvexBody& body, const Direction& u);

// Largest |x| over the body.  HPolytope is resolved through the support
// engine (see support_engine.hpp); for SupportCombo the value is a refined
// directional maximum and exact only in d=2.
double circumradius_origin(const ConvexBody& body);

// Largest r with r B^d inside the body: min_u h(K, u).  Exact for balls,
// d=2 polytopes and HPolytopes (minimum row offset); refined directional
// minimum otherwise.
double inradius_origin(const ConvexBody& body);

ConvexBody translate(const ConvexBody& body, const Vec& t);

// A representative interior point, used to center bodies before sampling.
Vec center_point(const ConvexBody& body);

// Observation windows are centered at the origin: a ball of radius R or a
// cube of half-side R.
struct Window {
  enum class Kind { Ball, Box };
  Kind kind = Kind::Ball;
  double radius = 1.0;
};

double support(const Window& w, const Direction& u);
double mean_width(const Window& w, int dim);

// ---- polygon helpers (d = 2) ----

// Counterclockwise convex hull, collinear interior points removed.  Returns
// 1 or 2 points for degenerate inputs.
std::vector<Vec> convex_hull_2d(std::vector<Vec> points);

double polygon_perimeter(const std::vector<Vec>& cycle);

double polygon_support(const std::vector<Vec>& cycle, const Vec& u);

// Euclidean distance from a point to a convex polygon (0 inside).
double point_to_polygon_distance(const Vec& p, const std::vector<Vec>& cycle);

struct SphericalQuadrature;

// Hausdorff distance via sup_u |h(A,u) - h(B,u)|.  Exact in d=2 for
// ball/VPolytope pairs (the maximum is attained in an explicitly
// enumerable candidate set); other combinations take the maximum over
// quadrature nodes and are approximations.
double hausdorff_distance(const ConvexBody& a, const ConvexBody& b,
                          const SphericalQuadrature* quad = nullptr);

}  // namespace kcell
