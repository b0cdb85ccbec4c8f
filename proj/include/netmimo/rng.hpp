#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace netmimo {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hashes a tuple of counters into a substream key.
inline std::uint64_t stream_key(std::initializer_list<std::uint64_t> fields) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t f : fields) h = mix64(h + 0x9e3779b97f4a7c15ULL + mix64(f));
  return h;
}

/// SplitMix64 stream with a complex Gaussian sampler. Each substream is
/// addressed by a key, so draws do not depend on evaluation order.
class Substream {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  explicit Substream(std::uint64_t key) : state_(key) {}

  result_type operator()() { return next(); }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on (0, 1].
  double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  /// Circularly-symmetric complex normal with E|z|^2 = variance.
  /// Ziggurat draws, which are defined by the library code rather than by
  /// the standard library implementation.
  std::complex<double> complex_normal(double variance) {
    boost::random::normal_distribution<double> normal;
    const double s = std::sqrt(0.5 * variance);
    const double re = normal(*this);
    return {s * re, s * normal(*this)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace netmimo
