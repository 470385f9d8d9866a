#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rjacobi {

// Bijective 64-bit finalizer (SplitMix64). Used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Documented seed-splitting rule: member `index` of an ensemble rooted at
// `base` draws from derive_seed(base, index). Parallel and serial runs agree
// because every member's stream depends only on (base, index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base + 0x9E3779B97F4A7C15ull * (index + 1));
}

// Standard-normal generator: mt19937_64 words mapped to (0,1] uniforms and
// combined by Box-Muller. std::normal_distribution is avoided on purpose --
// its algorithm is implementation-defined, which would make stored test
// expectations compiler-dependent.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on (0,1]; never returns 0, so log() below is safe.
  double uniform() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double two_pi = 6.283185307179586476925287;
    double r = std::sqrt(-2.0 * std::log(uniform()));
    double a = two_pi * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rjacobi
