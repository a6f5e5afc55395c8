#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <string_view>

namespace irteval::rng {

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

/// splitmix64 finalizer; a strong 64-bit mixing permutation.
inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t combine(std::uint64_t seed, std::uint64_t word) {
  return mix(seed + kGamma + mix(word + kGamma));
}

/// Derives an independent stream seed from a master seed and a key path.
/// Distinct paths give statistically independent streams, so adding new
/// streams never perturbs existing ones.
inline std::uint64_t derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix(master + kGamma);
  for (std::uint64_t word : path) h = combine(h, word);
  return h;
}

/// FNV-1a over the bytes of `text`; used to fold string ids into seeds.
inline std::uint64_t hash_bytes(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Maps a 64-bit word to the unit interval [0, 1).
inline double to_unit(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// Small deterministic generator (splitmix64 sequence). One Stream per
/// logical parameter keeps draws independent of every other parameter's
/// update schedule.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform draw in [0, 1).
  double next_unit() { return to_unit(next_u64()); }

  /// Standard normal via Box-Muller; the paired draw is cached.
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

  /// Uniform index in [0, n). Modulo bias is < 2^-53 for any practical n.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace irteval::rng
