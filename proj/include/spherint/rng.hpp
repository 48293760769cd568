#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace spherint {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw
// is a pure function of (seed, sample index, slot), so estimates do not
// depend on batching or thread scheduling.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> encrypt(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const std::array<std::uint32_t, 4> next = {
          static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
          static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
          static_cast<std::uint32_t>(p0)};
      ctr = next;
    }
    return ctr;
  }
};

// Deterministic stream of doubles for one (seed, sample) pair. Each Philox
// block yields two uniforms; normals come from Box-Muller on a block of
// their own. Draw order inside a sample is fixed by the caller's code path.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t sample)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        sample_lo_(static_cast<std::uint32_t>(sample)),
        sample_hi_(static_cast<std::uint32_t>(sample >> 32)) {}

  /// Standard normal.
  double normal() {
    if (have_normal_) {
      have_normal_ = false;
      return cached_normal_;
    }
    const auto [u_open, u_half] = next_pair();
    const double r = std::sqrt(-2.0 * std::log(u_open));
    const double phi = 2.0 * std::numbers::pi * u_half;
    cached_normal_ = r * std::sin(phi);
    have_normal_ = true;
    return r * std::cos(phi);
  }

  /// Uniform on [0, 1).
  double uniform() {
    if (have_uniform_) {
      have_uniform_ = false;
      return cached_uniform_;
    }
    const auto [u_open, u_half] = next_pair();
    cached_uniform_ = u_half;
    have_uniform_ = true;
    return u_open - 0x1p-53;  // back to [0, 1)
  }

 private:
  // First value in (0, 1], second in [0, 1).
  std::pair<double, double> next_pair() {
    const std::array<std::uint32_t, 4> ctr = {slot_++, sample_lo_, sample_hi_,
                                              0x53504852u};
    const auto r = Philox4x32::encrypt(ctr, key_);
    const std::uint64_t a =
        (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b =
        (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    const double u_open = static_cast<double>((a >> 11) + 1) * 0x1p-53;
    const double u_half = static_cast<double>(b >> 11) * 0x1p-53;
    return {u_open, u_half};
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t sample_lo_;
  std::uint32_t sample_hi_;
  std::uint32_t slot_ = 0;
  double cached_normal_ = 0.0;
  double cached_uniform_ = 0.0;
  bool have_normal_ = false;
  bool have_uniform_ = false;
};

/// Deterministic sub-seed derivation (splitmix64 finalizer over seed ^ tag).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace spherint
