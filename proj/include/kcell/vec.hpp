#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>

namespace kcell {

inline constexpr int kMaxDim = 6;

// Euclidean vector with runtime dimension <= kMaxDim.  Everything in this
// library lives in dimension 2..6, so a fixed-capacity value type avoids
// heap churn in the samplers and LP pivots.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim) : dim_(dim) {
    assert(dim >= 0 && dim <= kMaxDim);
    coords_.fill(0.0);
  }
  Vec(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
    assert(dim_ <= kMaxDim);
    coords_.fill(0.0);
    int i = 0;
    for (double x : xs) coords_[i++] = x;
  }

  static Vec zero(int dim) { return Vec(dim); }
  static Vec axis(int dim, int k, double scale = 1.0) {
    Vec v(dim);
    v[k] = scale;
    return v;
  }

  int dim() const { return dim_; }

  double& operator[](int i) {
    assert(i >= 0 && i < dim_);
    return coords_[i];
  }
  double operator[](int i) const {
    assert(i >= 0 && i < dim_);
    return coords_[i];
  }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) coords_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += coords_[i] * o.coords_[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  Vec normalized() const {
    double n = norm();
    assert(n > 0.0);
    Vec v = *this;
    v *= 1.0 / n;
    return v;
  }

  double dist(const Vec& o) const { return (*this - o).norm(); }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ", ";
      s += std::to_string(coords_[i]);
    }
    return s + ")";
  }

 private:
  std::array<double, kMaxDim> coords_{};
  int dim_ = 0;
};

inline double dot(const Vec& a, const Vec& b) { return a.dot(b); }

// 2-D cross product (z component); positive when b is counterclockwise of a.
inline double cross2(const Vec& a, const Vec& b) {
  assert(a.dim() == 2 && b.dim() == 2);
  return a[0] * b[1] - a[1] * b[0];
}

}  // namespace kcell
