#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace curlra::detail {

// Seeded generator with hand-rolled output transforms.  The standard
// distributions are implementation-defined, so drawing through them would
// tie reproducibility to one standard library; the raw engine stream is
// specified exactly and these transforms are pinned here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return double(eng_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (single branch, cosine only).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Uniform integer in [0, n), rejection-free is not needed at our scales
  // but rejection keeps it exactly uniform.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 eng_;
};

// Cheap seed mixer so per-block or per-trial streams derived from one user
// seed stay decorrelated (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace curlra::detail
