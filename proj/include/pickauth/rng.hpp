#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace pickauth {

// splitmix64 finalizer; spreads nearby seeds far apart before they reach
// the engine so per-file / per-sample streams stay uncorrelated.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> streams) noexcept {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t v : streams) s = splitmix64(s ^ splitmix64(v + 0x632be59bd9b4e019ull));
  return s;
}

/// Seeded random source. The raw engine is std::mt19937_64 (bit-exact output
/// is mandated by the standard); the distributions are hand-rolled because
/// std::normal_distribution is implementation-defined and would break
/// byte-identical dataset regeneration across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate is discarded so the
  /// draw count per call is fixed.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

private:
  std::mt19937_64 eng_;
};

}  // namespace pickauth
