#pragma once

#include <cstdint>
#include <random>

namespace sj {

// Deterministic draws pinned down to the bit level: we only rely on
// std::mt19937_64's output stream (which the standard fixes exactly) and do all
// distribution shaping by hand, so results are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // Uniform in [0,1) with 53-bit resolution.
  double unif() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double unif(double lo, double hi) { return lo + (hi - lo) * unif(); }

  // Uniform integer in [lo, hi] (inclusive); rejection-free modulo bias is
  // irrelevant for our tiny ranges but we keep it exact anyway.
  long long unif_int(long long lo, long long hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % span);
    std::uint64_t v;
    do { v = eng_(); } while (v >= limit);
    return lo + static_cast<long long>(v % span);
  }

  bool coin() { return (eng_() & 1u) != 0; }

  // Standard normal via Box-Muller on pinned uniforms.
  double normal() {
    double u1 = unif(), u2 = unif();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

// splitmix64: stable stream-splitting hash used to derive per-sample seeds so
// parallel scheduling cannot affect what gets sampled.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9E3779B97F4A7C15ull * (b + 1);
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
inline std::uint64_t mix_seed(std::uint64_t a, const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) { h ^= c; h *= 1099511628211ull; }
  return mix_seed(a, h);
}

}  // namespace sj
