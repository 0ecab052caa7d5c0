#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace gradednet {

/// Deterministic random stream. All randomness in the library flows through
/// explicit seeds; nothing reads entropy from the environment.
///
/// The Gaussian sampler is hand-rolled (Box-Muller over the mt19937_64
/// bitstream) because std::normal_distribution's sequence is
/// implementation-defined and would break cross-toolchain reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; two uniforms per draw, no cached spare.
  double normal() {
    // u1 in (0, 1] so log(u1) is finite.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Normal with the N(mean, variance) convention (second argument is the
  /// variance, matching the usual mathematical notation).
  double normal(double mean, double variance) {
    return mean + std::sqrt(variance) * normal();
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 gen_;
};

/// FNV-1a 64-bit hash; used for config hashes, file checksums, and seed
/// derivation tags.
inline std::uint64_t fnv1a(std::string_view bytes,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// splitmix64 finalizer; decorrelates derived seeds.
inline std::uint64_t mix_u64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Independent stream seed for (base seed, purpose tag) pairs, so e.g. the
/// dataset stream and each model's init stream never overlap.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return mix_u64(base ^ fnv1a(tag));
}

}  // namespace gradednet
