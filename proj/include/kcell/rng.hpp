#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "kcell/vec.hpp"

namespace kcell {

// Philox4x32-10 counter-based generator.  A stream is addressed by
// (master_seed, stream_id); draws within a stream are addressed by a 64-bit
// block counter.  Any (seed, stream) pair can be replayed independently of
// every other stream, which is what makes worker-count-independent campaigns
// cheap: replica r always reads stream r no matter which thread runs it.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        ctr2_(static_cast<std::uint32_t>(stream)),
        ctr3_(static_cast<std::uint32_t>(stream >> 32)) {}

  std::uint32_t next_u32() {
    if (have_ == 0) refill();
    return out_[4 - have_--];
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on the open interval (0,1): 53 random bits centered in the cell,
  // so neither endpoint is reachable and log(u) is always finite.
  double u01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  double exponential(double rate) { return -std::log(u01()) / rate; }

  double gaussian() {
    if (have_gauss_) {
      have_gauss_ = false;
      return spare_gauss_;
    }
    double u1 = u01();
    double u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_gauss_ = r * std::sin(a);
    have_gauss_ = true;
    return r * std::cos(a);
  }

  // Poisson via inversion for small means and Hormann's PTRS transformed
  // rejection for large ones.  Both consume a data-dependent number of
  // uniforms; streams are never split mid-replica so that is harmless.
  std::uint64_t poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_inversion(mean);
    return poisson_ptrs(mean);
  }

  // Uniform direction on the unit sphere from normalized Gaussians.
  Vec sphere_direction(int dim) {
    Vec v(dim);
    double n2;
    do {
      for (int i = 0; i < dim; ++i) v[i] = gaussian();
      n2 = v.norm2();
    } while (n2 < 1e-24);
    return v * (1.0 / std::sqrt(n2));
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
  }

  void refill() {
    std::uint32_t c0 = static_cast<std::uint32_t>(block_);
    std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t c2 = ctr2_, c3 = ctr3_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(kMul0, c0, hi0, lo0);
      mulhilo(kMul1, c2, hi1, lo1);
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    out_[0] = c0;
    out_[1] = c1;
    out_[2] = c2;
    out_[3] = c3;
    ++block_;
    have_ = 4;
  }

  std::uint64_t poisson_inversion(double mean) {
    double limit = std::exp(-mean);
    double prod = u01();
    std::uint64_t k = 0;
    while (prod > limit) {
      prod *= u01();
      ++k;
    }
    return k;
  }

  std::uint64_t poisson_ptrs(double mean) {
    double log_mean = std::log(mean);
    double b = 0.931 + 2.53 * std::sqrt(mean);
    double a = -0.059 + 0.02483 * b;
    double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = u01() - 0.5;
      double v = u01();
      double us = 0.5 - std::fabs(u);
      double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
      double rhs = -mean + kf * log_mean - std::lgamma(kf + 1.0);
      if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
    }
  }

  std::uint32_t key0_, key1_;
  std::uint32_t ctr2_, ctr3_;
  std::uint64_t block_ = 0;
  std::uint32_t out_[4] = {0, 0, 0, 0};
  int have_ = 0;
  bool have_gauss_ = false;
  double spare_gauss_ = 0.0;
};

// Handle describing a replayable stream.  Campaign code derives one stream
// per replica (and per sub-purpose where a replica needs several independent
// sources) so results do not depend on scheduling.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  Philox open() const { return Philox(master_seed, stream_id); }
  RngStream substream(std::uint64_t k) const {
    // 2^20 sub-slots per logical stream; campaigns stay far below that.
    return RngStream{master_seed, (stream_id << 20) | k};
  }
};

}  // namespace kcell
