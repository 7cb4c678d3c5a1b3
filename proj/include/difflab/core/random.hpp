#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace difflab {

/// Seeded generator with platform-independent real draws (the standard
/// distributions are implementation-defined, which would break byte-identical reports).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  long integer(long lo, long hi) { return lo + static_cast<long>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double normal() {
    double u1 = uniform(), u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  std::vector<double> unit_vector(std::size_t n) {
    std::vector<double> v(n);
    double norm = 0.0;
    while (norm < 1e-12) {
      norm = 0.0;
      for (auto& x : v) {
        x = normal();
        norm += x * x;
      }
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
  }
  std::uint64_t next() { return eng_(); }

private:
  std::mt19937_64 eng_;
};

/// Derives an independent stream seed from a parent seed and an index.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace difflab
