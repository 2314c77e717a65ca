#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hi2c {

using BallId = std::uint64_t;
using Bin = std::uint32_t;

/// Which of the two hashes a ball currently uses.
enum class Choice : std::uint8_t { first = 1, second = 2 };

enum class BallType : std::uint8_t { one = 1, two = 2, three = 3 };

inline int type_index(BallType t) { return static_cast<int>(t); }

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a ball set holds more than m balls.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Ball id layout. Real balls live in [0, 2^63). Padding dummies take
// 2^63 + k. Swap dummies (surrogates created by two-phase swapping) use the
// top quarter and encode (phase, bin, tape index).
inline constexpr BallId kMaxRealBall = (BallId{1} << 63) - 1;
inline constexpr BallId kPadBase = BallId{1} << 63;
inline constexpr BallId kSwapBase = BallId{3} << 62;
inline constexpr int kSwapBinShift = 28;
inline constexpr BallId kSwapIndexMask = (BallId{1} << kSwapBinShift) - 1;

inline constexpr bool is_real(BallId x) { return x <= kMaxRealBall; }
inline constexpr bool is_pad_dummy(BallId x) { return x >= kPadBase && x < kSwapBase; }
inline constexpr bool is_swap_dummy(BallId x) { return x >= kSwapBase; }

inline constexpr BallId pad_dummy_id(std::uint64_t k) { return kPadBase + k; }

inline BallId swap_dummy_id(int phase, Bin bin, std::uint64_t tape_index) {
  if (tape_index > kSwapIndexMask) throw std::out_of_range("swap dummy tape index too large");
  return kSwapBase | (BallId(phase - 1) << 59) | (BallId(bin) << kSwapBinShift) | tape_index;
}

/// Exact rational with positive denominator, used for m/n based metrics.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const auto g = std::gcd(num < 0 ? -num : num, den);
    return g > 1 ? Rational{num / g, den / g} : Rational{num, den};
  }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
  }
};

/// Bin count n and capacity m. The density mu = m/n is kept exact.
struct Config {
  std::uint64_t n = 1;
  std::uint64_t m = 1;

  Config() = default;
  Config(std::uint64_t bins, std::uint64_t capacity) : n(bins), m(capacity) { validate(); }

  static Config from_mu(std::uint64_t bins, std::uint64_t mu) { return Config(bins, bins * mu); }

  void validate() const {
    if (n < 1) throw ConfigError("bin count n must be >= 1");
    if (m < 1) throw ConfigError("capacity m must be >= 1");
    if (n >= (std::uint64_t{1} << 31)) throw ConfigError("bin count n must be < 2^31");
  }
  Rational mu() const { return Rational::make(static_cast<std::int64_t>(m), static_cast<std::int64_t>(n)); }
  std::uint64_t mu_floor() const { return m / n; }
};

}  // namespace hi2c
