#include "doctest.h"

#include <cmath>
#include <set>

#include "kcell/rng.hpp"
#include "kcell/vec.hpp"

using namespace kcell;

TEST_CASE("vec arithmetic and norms") {
  Vec a{3.0, 4.0};
  Vec b{-1.0, 2.0};
  CHECK(a.dim() == 2);
  CHECK(a.norm() == doctest::Approx(5.0));
  CHECK(dot(a, b) == doctest::Approx(5.0));
  CHECK((a + b)[0] == doctest::Approx(2.0));
  CHECK((a - b)[1] == doctest::Approx(2.0));
  CHECK((a * 2.0)[0] == doctest::Approx(6.0));
  CHECK(a.normalized().norm() == doctest::Approx(1.0));
  CHECK(Vec::axis(3, 1)[1] == 1.0);
  CHECK(Vec::zero(4).norm() == 0.0);
  CHECK(cross2(Vec{1.0, 0.0}, Vec{0.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("philox streams are deterministic and independent") {
  Philox a = RngStream{42, 7}.open();
  Philox b = RngStream{42, 7}.open();
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // Different stream ids give different sequences from the same seed.
  Philox c = RngStream{42, 8}.open();
  int same = 0;
  Philox a2 = RngStream{42, 7}.open();
  for (int i = 0; i < 64; ++i)
    if (a2.next_u64() == c.next_u64()) ++same;
  CHECK(same == 0);

  // Substreams do not collide with each other or the parent.
  std::set<std::uint64_t> firsts;
  RngStream parent{42, 3};
  firsts.insert(parent.open().next_u64());
  for (std::uint64_t k = 0; k < 32; ++k)
    firsts.insert(parent.substream(k).open().next_u64());
  CHECK(firsts.size() == 33);
}

TEST_CASE("u01 stays inside the open unit interval") {
  Philox rng = RngStream{1, 0}.open();
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = rng.u01();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  // Mean of U(0,1): sd of the average is 1/sqrt(12 n).
  CHECK(std::fabs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("gaussian moments") {
  Philox rng = RngStream{2, 0}.open();
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.gaussian();
    s1 += g;
    s2 += g * g;
  }
  CHECK(std::fabs(s1 / n) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson mean and variance across both sampling regimes") {
  Philox rng = RngStream{3, 0}.open();
  for (double mean : {3.7, 120.0}) {
    const int n = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double k = static_cast<double>(rng.poisson(mean));
      s1 += k;
      s2 += k * k;
    }
    double m = s1 / n;
    double v = s2 / n - m * m;
    // Both moments equal the rate; 5 sigma bands.
    CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(mean / n));
    CHECK(std::fabs(v - mean) < 5.0 * std::sqrt(2.0 * mean * mean / n) + 0.05 * mean);
  }
}

TEST_CASE("sphere directions are unit length and centered") {
  for (int dim : {2, 3, 5}) {
    Philox rng = RngStream{4, static_cast<std::uint64_t>(dim)}.open();
    const int n = 20000;
    Vec sum = Vec::zero(dim);
    for (int i = 0; i < n; ++i) {
      Vec u = rng.sphere_direction(dim);
      CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-12));
      sum = sum + u;
    }
    // Component averages vanish like 1/sqrt(dim * n).
    for (int i = 0; i < dim; ++i)
      CHECK(std::fabs(sum[i] / n) < 5.0 / std::sqrt(static_cast<double>(n)));
  }
}
