#include "doctest.h"

#include <cmath>

#include "kcell/geom.hpp"
#include "kcell/quadrature.hpp"
#include "kcell/rng.hpp"

using namespace kcell;

TEST_CASE("direction normalizes and rejects the zero vector") {
  Direction u(Vec{3.0, 4.0});
  CHECK(u.vec().norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u[0] == doctest::Approx(0.6));
  CHECK_THROWS_AS(Direction(Vec{0.0, 0.0}), std::invalid_argument);
  CHECK(u.flipped()[1] == doctest::Approx(-0.8));
}

TEST_CASE("hyperplane identifies its two signed representations") {
  Hyperplane h(Direction(Vec{1.0, 1.0}), 2.0);
  Hyperplane same(Direction(Vec{-1.0, -1.0}), -2.0);
  Hyperplane other(Direction(Vec{1.0, 1.0}), 2.5);
  CHECK(h.same_hyperplane(same));
  CHECK(!h.same_hyperplane(other));
  // Canonicalization is idempotent and sign-fixed on the first nonzero
  // coordinate.
  CHECK(same.canonical().normal[0] > 0.0);
  CHECK(same.canonical().offset == doctest::Approx(2.0));
}

TEST_CASE("support functions of the basic bodies") {
  Direction e0 = Direction::unit(Vec::axis(2, 0));
  Direction diag(Vec{1.0, 1.0});

  ConvexBody ball = make_ball(Vec{1.0, 0.0}, 2.0);
  CHECK(support(ball, e0) == doctest::Approx(3.0));
  CHECK(support(ball, diag) == doctest::Approx(2.0 + 1.0 / std::sqrt(2.0)));

  ConvexBody square = make_unit_cube(2);  // [0,1]^2
  CHECK(support(square, e0) == doctest::Approx(1.0));
  CHECK(support(square, diag) == doctest::Approx(std::sqrt(2.0)));

  // Minkowski combination: supports add with the weights.
  ConvexBody combo = make_combo({{0.5, ball}, {0.5, square}});
  CHECK(support(combo, e0) == doctest::Approx(2.0));

  ConvexBody hpoly = make_hpolytope(
      {Hyperplane(Direction(Vec{1.0, 0.0}), 1.0),
       Hyperplane(Direction(Vec{-1.0, 0.0}), 1.0),
       Hyperplane(Direction(Vec{0.0, 1.0}), 1.0),
       Hyperplane(Direction(Vec{0.0, -1.0}), 1.0)},
      Vec::zero(2));
  CHECK_THROWS_AS(support(hpoly, e0), std::logic_error);
}

TEST_CASE("cube factories agree with hand-built vertices") {
  ConvexBody cube = make_cube(2, 0.5);
  CHECK(support(cube, Direction(Vec{1.0, 1.0})) == doctest::Approx(std::sqrt(0.5)));
  CHECK(circumradius_origin(cube) == doctest::Approx(std::sqrt(0.5)));
  CHECK(inradius_origin(cube) == doctest::Approx(0.5));

  ConvexBody unit = make_unit_cube(3);
  CHECK(circumradius_origin(unit) == doctest::Approx(std::sqrt(3.0)));
  // The origin is a vertex of [0,1]^3, so no centered ball fits inside.
  CHECK(inradius_origin(unit) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("convex hull in the plane") {
  std::vector<Vec> pts = {Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{1.0, 1.0},
                          Vec{0.0, 1.0}, Vec{0.5, 0.5}, Vec{0.5, 0.0},
                          Vec{1.0, 0.0}};
  std::vector<Vec> hull = convex_hull_2d(pts);
  CHECK(hull.size() == 4);
  CHECK(polygon_perimeter(hull) == doctest::Approx(4.0));
  // Counterclockwise orientation: positive cross products all the way round.
  for (size_t i = 0; i < hull.size(); ++i) {
    const Vec& a = hull[i];
    const Vec& b = hull[(i + 1) % hull.size()];
    const Vec& c = hull[(i + 2) % hull.size()];
    CHECK(cross2(b - a, c - b) > 0.0);
  }

  std::vector<Vec> segment = convex_hull_2d({Vec{0.0, 0.0}, Vec{2.0, 0.0}, Vec{1.0, 0.0}});
  CHECK(segment.size() == 2);
}

TEST_CASE("point to polygon distance") {
  std::vector<Vec> square = {Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{1.0, 1.0}, Vec{0.0, 1.0}};
  CHECK(point_to_polygon_distance(Vec{0.5, 0.5}, square) == doctest::Approx(0.0));
  CHECK(point_to_polygon_distance(Vec{2.0, 0.5}, square) == doctest::Approx(1.0));
  CHECK(point_to_polygon_distance(Vec{2.0, 2.0}, square) ==
        doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("mean width of windows") {
  // Ball window: width 2R in every direction.
  CHECK(mean_width(Window{Window::Kind::Ball, 3.0}, 2) == doctest::Approx(6.0));
  CHECK(mean_width(Window{Window::Kind::Ball, 3.0}, 3) == doctest::Approx(6.0));
  // Cube window of half-side R: 2 R d E|u_1| with E|u_1| = 2/pi in the
  // plane and 1/2 in space.
  CHECK(mean_width(Window{Window::Kind::Box, 2.0}, 2) ==
        doctest::Approx(16.0 / M_PI));
  CHECK(mean_width(Window{Window::Kind::Box, 2.0}, 3) == doctest::Approx(6.0));

  Direction diag(Vec{1.0, 1.0});
  CHECK(support(Window{Window::Kind::Box, 2.0}, diag) ==
        doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(support(Window{Window::Kind::Ball, 2.0}, diag) == doctest::Approx(2.0));
}

TEST_CASE("hausdorff distance exact cases") {
  ConvexBody b1 = make_unit_ball(2);
  ConvexBody b2 = make_ball(Vec::zero(2), 2.0);
  CHECK(hausdorff_distance(b1, b2) == doctest::Approx(1.0));

  ConvexBody shifted = make_ball(Vec{0.25, 0.0}, 1.0);
  CHECK(hausdorff_distance(b1, shifted) == doctest::Approx(0.25));

  // Centered unit square vs unit ball: the support gap peaks at the axis
  // directions where the square's support is 1/2.
  ConvexBody square = make_cube(2, 0.5);
  CHECK(hausdorff_distance(b1, square) == doctest::Approx(0.5));

  // Square vs its translate: distance equals the shift length, attained at
  // the vertex-difference directions the candidate set must include.
  ConvexBody square2 = translate(square, Vec{0.3, 0.4});
  CHECK(hausdorff_distance(square, square2) == doctest::Approx(0.5));

  // Identity and symmetry.
  CHECK(hausdorff_distance(square, square) == doctest::Approx(0.0));
  CHECK(hausdorff_distance(b1, square) == doctest::Approx(hausdorff_distance(square, b1)));
}

TEST_CASE("hausdorff exact polygon answer dominates a dense direction scan") {
  Philox rng = RngStream{11, 0}.open();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> pa, pb;
    for (int i = 0; i < 7; ++i) {
      pa.push_back(Vec{rng.uniform(-1, 1), rng.uniform(-1, 1)});
      pb.push_back(Vec{rng.uniform(-1, 1), rng.uniform(-1, 1)});
    }
    ConvexBody a = make_vpolytope(convex_hull_2d(pa));
    ConvexBody b = make_vpolytope(convex_hull_2d(pb));
    double exact = hausdorff_distance(a, b);
    double scan = 0.0;
    for (int k = 0; k < 5000; ++k) {
      double ang = 2.0 * M_PI * k / 5000.0;
      Direction u = Direction::unit(Vec{std::cos(ang), std::sin(ang)});
      scan = std::max(scan, std::fabs(support(a, u) - support(b, u)));
    }
    CHECK(exact >= scan - 1e-9);
    CHECK(exact <= scan + 0.01);  // the scan only misses by angular resolution
  }
}

TEST_CASE("translate and center_point") {
  ConvexBody square = make_unit_cube(2);
  Vec c = center_point(square);
  CHECK(c[0] == doctest::Approx(0.5));
  CHECK(c[1] == doctest::Approx(0.5));

  ConvexBody moved = translate(square, Vec{-0.5, -0.5});
  CHECK(support(moved, Direction::unit(Vec::axis(2, 0))) == doctest::Approx(0.5));
  CHECK(inradius_origin(moved) == doctest::Approx(0.5));

  ConvexBody ball = make_ball(Vec{2.0, 1.0}, 1.5);
  Vec bc = center_point(ball);
  CHECK(bc[0] == doctest::Approx(2.0));
  CHECK(bc[1] == doctest::Approx(1.0));

  // Translating a combination moves its support the same way.
  ConvexBody combo = make_combo({{0.5, make_unit_ball(2)}, {0.5, square}});
  ConvexBody combo_moved = translate(combo, Vec{1.0, 0.0});
  Direction e0 = Direction::unit(Vec::axis(2, 0));
  CHECK(support(combo_moved, e0) == doctest::Approx(support(combo, e0) + 1.0));
}

TEST_CASE("circumradius and inradius of off-center bodies") {
  ConvexBody ball = make_ball(Vec{1.0, 0.0}, 0.25);
  CHECK(circumradius_origin(ball) == doctest::Approx(1.25));
  // Origin outside the body: no inscribed centered ball.
  CHECK(inradius_origin(ball) <= 0.0);

  ConvexBody tri = make_vpolytope({Vec{2.0, 0.0}, Vec{-1.0, 1.0}, Vec{-1.0, -1.0}});
  CHECK(circumradius_origin(tri) == doctest::Approx(2.0));
}
