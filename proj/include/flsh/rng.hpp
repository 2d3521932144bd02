#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace flsh {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derive an independent 64-bit seed from a parent seed and a tag.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::uint64_t tag) noexcept {
  return mix64(mix64(parent + 0x9E3779B97F4A7C15ULL) ^
               mix64(tag + 0x632BE59BD9B4E019ULL));
}

/**
 * Counter-based random stream.
 *
 * Every draw is a pure function of (seed, stream, index, lane), so any
 * element can be regenerated without replaying the stream. This is what lets
 * hash coefficient vectors grow lazily and still be order independent.
 */
class CounterRng {
public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(mix64(seed + 0x9E3779B97F4A7C15ULL) ^
                   (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

  constexpr std::uint64_t bits(std::uint64_t index,
                               std::uint32_t lane = 0) const noexcept {
    return mix64(key_ ^ mix64(index * 0x9E3779B97F4A7C15ULL +
                              (std::uint64_t{lane} << 56) + 1));
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t index, std::uint32_t lane = 0) const noexcept {
    return (static_cast<double>(bits(index, lane) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on lanes 0 and 1.
  double normal(std::uint64_t index) const noexcept {
    const double u1 = uniform(index, 0);
    const double u2 = uniform(index, 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Standard Cauchy via the inverse CDF.
  double cauchy(std::uint64_t index) const noexcept {
    return std::tan(std::numbers::pi * (uniform(index, 0) - 0.5));
  }

  double exponential(std::uint64_t index, std::uint32_t lane) const noexcept {
    return -std::log(uniform(index, lane));
  }

  /**
   * Symmetric alpha-stable draw (Chambers-Mallows-Stuck), unit scale.
   *
   * With alpha = 2 this yields N(0, 2); callers wanting the standard normal
   * for p = 2 should use normal().
   */
  double symmetric_stable(double alpha, std::uint64_t index) const noexcept {
    const double v = std::numbers::pi * (uniform(index, 0) - 0.5);
    const double w = exponential(index, 1);
    if (alpha == 1.0)
      return std::tan(v);
    const double a = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
    const double b =
        std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
    return a * b;
  }

private:
  std::uint64_t key_;
};

} // namespace flsh
