#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace specstat {

/// Reproducible random stream: stream `i` of a master seed is an
/// mt19937_64 generator seeded with the (i+1)-th output of the splitmix64
/// sequence started at the master seed,
///
///   z = master_seed + (i+1) * 0x9E3779B97F4A7C15
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   seed_i = z ^ (z >> 31)
///
/// Identical (master_seed, stream_index) pairs reproduce identical variate
/// sequences bitwise; distinct stream indices give statistically independent
/// streams. Variates are generated with explicit algorithms (53-bit uniforms,
/// Marsaglia polar normals) instead of std:: distributions, whose output
/// sequences are implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_seed_(master_seed),
        stream_index_(stream_index),
        gen_(derive_seed(master_seed, stream_index)) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [a,b).
  double uniform(double a, double b) {
    double r = a + (b - a) * uniform();
    if (r >= b) r = std::nextafter(b, a);  // guard the half-open contract
    return r;
  }

  /// Standard normal variate (Marsaglia polar method, second value cached).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    have_cached_ = true;
    return u * f;
  }

  static std::uint64_t derive_seed(std::uint64_t master_seed,
                                   std::uint64_t stream_index) {
    std::uint64_t z = master_seed + (stream_index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 gen_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace specstat
