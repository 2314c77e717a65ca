#pragma once

#include <sodium.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hi2c/core.hpp"
#include "hi2c/schedule.hpp"

namespace hi2c {

namespace detail {

inline void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) throw std::runtime_error("libsodium initialisation failed");
}

inline void put_le64(unsigned char* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

inline std::uint64_t get_le64(const unsigned char* in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}

// Uniform reduction of a 64-bit word into [0, bound).
inline std::uint64_t reduce(std::uint64_t word, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(word) * bound) >> 64);
}

}  // namespace detail

/// 256-bit experiment key. Everything random in a run is derived from it.
class MasterSeed {
 public:
  using Key = std::array<unsigned char, 32>;

  MasterSeed() = default;
  explicit MasterSeed(const Key& key) : key_(key) {}

  /// Accepts exactly 64 hex characters (case-insensitive). The key is the
  /// BLAKE2b-256 digest of the lower-cased string, so the same text gives the
  /// same key on every platform.
  static MasterSeed from_hex(std::string_view hex) {
    if (hex.size() != 64) throw ConfigError("seed must be 64 hex characters");
    std::string canon(hex);
    for (char& c : canon) {
      if (!std::isxdigit(static_cast<unsigned char>(c))) throw ConfigError("seed has a non-hex character");
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    detail::ensure_sodium();
    static constexpr std::string_view kDomain = "hi2c/seed/v1:";
    const std::string msg = std::string(kDomain) + canon;
    Key key{};
    crypto_generichash(key.data(), key.size(), reinterpret_cast<const unsigned char*>(msg.data()), msg.size(),
                       nullptr, 0);
    return MasterSeed(key);
  }

  /// Independent child key, e.g. one per trial.
  MasterSeed derive(std::string_view label, std::uint64_t index) const {
    detail::ensure_sodium();
    std::string msg = "hi2c/derive:";
    msg.append(label);
    unsigned char idx[8];
    detail::put_le64(idx, index);
    msg.append(reinterpret_cast<const char*>(idx), 8);
    Key child{};
    crypto_generichash(child.data(), child.size(), reinterpret_cast<const unsigned char*>(msg.data()), msg.size(),
                       key_.data(), key_.size());
    return MasterSeed(child);
  }

  const Key& key() const { return key_; }
  friend bool operator==(const MasterSeed&, const MasterSeed&) = default;

 private:
  Key key_{};
};

inline constexpr std::string_view kDefaultSeedHex =
    "0123456789abcdef0123456789abcdef0123456789abcdef0123456789abcdef";

/// Requirements on a source of per-ball randomness. `Oracle` is the real
/// one; tests substitute scripted sources to pin hashes by hand.
template <class O>
concept BallOracle = requires(const O& o, BallId x, std::uint64_t n, const Schedule& s, Bin b, int phase,
                              std::uint64_t k, std::uint32_t parts) {
  { o.hash1(x, n) } -> std::convertible_to<Bin>;
  { o.hash2(x, n) } -> std::convertible_to<Bin>;
  { o.ball_type(x) } -> std::same_as<BallType>;
  { o.round_of(x, s) } -> std::same_as<std::optional<int>>;
  { o.dummy_second_hash(b, phase, k, n) } -> std::convertible_to<Bin>;
  { o.eco_label(x, parts) } -> std::convertible_to<std::uint32_t>;
};

/// Keyed PRF with domain-separated streams.
///
/// Each stream label gets its own 128-bit SipHash-2-4 key, derived from the
/// master key with keyed BLAKE2b. A stream word is SipHash over the
/// little-endian encoding of the integer inputs. Stateless after
/// construction, so concurrent use is safe.
class Oracle {
 public:
  using StreamKey = std::array<unsigned char, crypto_shorthash_KEYBYTES>;

  explicit Oracle(const MasterSeed& seed) : seed_(seed) {
    detail::ensure_sodium();
    h1_ = stream_key("h1");
    h2_ = stream_key("h2");
    type_ = stream_key("type");
    round_ = stream_key("round");
    dummy_ = stream_key("dummy");
    eco_ = stream_key("eco");
  }

  const MasterSeed& seed() const { return seed_; }

  std::uint64_t prf(std::string_view label, std::span<const std::uint64_t> inputs) const {
    const StreamKey* key = known_key(label);
    if (key != nullptr) return word(*key, inputs);
    const StreamKey derived = stream_key(label);
    return word(derived, inputs);
  }

  Bin hash1(BallId x, std::uint64_t n) const { return bounded(h1_, x, n); }
  Bin hash2(BallId x, std::uint64_t n) const { return bounded(h2_, x, n); }

  /// Types 1, 2, 3 with probabilities 0.89, 0.10, 0.01.
  BallType ball_type(BallId x) const {
    const std::uint64_t in[1] = {x};
    const std::uint64_t bucket = detail::reduce(word(type_, in), 100);
    if (bucket < 89) return BallType::one;
    if (bucket < 99) return BallType::two;
    return BallType::three;
  }

  /// Round-assigned balls are exactly the Type 3 balls. Conditional on
  /// assignment, round t is drawn with weight mu[t-1] (equivalently m_{t-1}).
  std::optional<int> round_of(BallId x, const Schedule& sched) const {
    if (sched.rounds == 0 || ball_type(x) != BallType::three) return std::nullopt;
    const std::uint64_t in[1] = {x};
    const std::uint64_t r = detail::reduce(word(round_, in), sched.total_round_weight());
    const auto& prefix = sched.round_weight_prefix;
    // First t with prefix[t] > r.
    const auto it = std::upper_bound(prefix.begin() + 1, prefix.end(), r);
    return static_cast<int>(it - prefix.begin());
  }

  /// Position k of the second-hash tape of `bin` for swap phase 1 or 2.
  Bin dummy_second_hash(Bin bin, int phase, std::uint64_t k, std::uint64_t n) const {
    if (n == 0) throw ConfigError("bin count must be >= 1");
    const std::uint64_t in[3] = {static_cast<std::uint64_t>(phase), bin, k};
    return static_cast<Bin>(detail::reduce(word(dummy_, in), n));
  }

  std::uint32_t eco_label(BallId x, std::uint32_t parts) const {
    if (parts == 0) throw ConfigError("ECO part count must be >= 1");
    const std::uint64_t in[1] = {x};
    return static_cast<std::uint32_t>(detail::reduce(word(eco_, in), parts));
  }

 private:
  StreamKey stream_key(std::string_view label) const {
    const std::string msg = "hi2c/stream:" + std::string(label);
    StreamKey key{};
    crypto_generichash(key.data(), key.size(), reinterpret_cast<const unsigned char*>(msg.data()), msg.size(),
                       seed_.key().data(), seed_.key().size());
    return key;
  }

  const StreamKey* known_key(std::string_view label) const {
    if (label == "h1") return &h1_;
    if (label == "h2") return &h2_;
    if (label == "type") return &type_;
    if (label == "round") return &round_;
    if (label == "dummy") return &dummy_;
    if (label == "eco") return &eco_;
    return nullptr;
  }

  static std::uint64_t word(const StreamKey& key, std::span<const std::uint64_t> inputs) {
    unsigned char stack_buf[64];
    std::string heap_buf;
    unsigned char* buf = stack_buf;
    if (inputs.size() * 8 > sizeof(stack_buf)) {
      heap_buf.resize(inputs.size() * 8);
      buf = reinterpret_cast<unsigned char*>(heap_buf.data());
    }
    for (std::size_t i = 0; i < inputs.size(); ++i) detail::put_le64(buf + 8 * i, inputs[i]);
    unsigned char out[crypto_shorthash_BYTES];
    crypto_shorthash(out, buf, inputs.size() * 8, key.data());
    return detail::get_le64(out);
  }

  static Bin bounded(const StreamKey& key, BallId x, std::uint64_t n) {
    if (n == 0) throw ConfigError("bin count must be >= 1");
    const std::uint64_t in[1] = {x};
    return static_cast<Bin>(detail::reduce(word(key, in), n));
  }

  MasterSeed seed_;
  StreamKey h1_{}, h2_{}, type_{}, round_{}, dummy_{}, eco_{};
};

static_assert(BallOracle<Oracle>);

}  // namespace hi2c
