#pragma once

#include <complex>
#include <cstdint>
#include <cmath>

namespace scrooge {

// Stream tags keep independent random uses (sampling, probe selection, ...)
// from colliding on the same master seed.
namespace rng_stream {
inline constexpr std::uint64_t kSampler = 0x5363726f6f676531ull;
inline constexpr std::uint64_t kProbes = 0x70726f6265736574ull;
inline constexpr std::uint64_t kStateFactory = 0x726f68616d616b65ull;
inline constexpr std::uint64_t kObservables = 0x6f627365727661ull;
inline constexpr std::uint64_t kOptimizer = 0x6f7074696d697a65ull;
}  // namespace rng_stream

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Counter-based generator: the stream for element `index` of a given
// (master_seed, stream) pair is a pure function of those three values, so
// sample i is identical no matter which thread draws it or in what order.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index)
      : state_(splitmix64(splitmix64(master_seed ^ stream) ^ splitmix64(index * 0x9e3779b97f4a7c15ull + stream))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to pass through log().
  double uniform_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  std::uint64_t uniform_index(std::uint64_t n) {
    // Desk-scale n: modulo bias is below 2^-40 for n < 2^24.
    return next_u64() % n;
  }

  // Standard normal via Box-Muller; values come in pairs.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_open();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Complex normal with unit variance per entry (re and im each var 1/2).
  std::complex<double> complex_normal() {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    double re = normal();
    double im = normal();
    return {re * inv_sqrt2, im * inv_sqrt2};
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace scrooge
