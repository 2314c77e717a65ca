#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hi2c/core.hpp"

namespace hi2c {

namespace detail {

// Largest r with r^4 <= x^3, i.e. floor(x^(3/4)) computed exactly.
inline std::uint64_t floor_pow_three_quarters(std::uint64_t x) {
  if (x == 0) return 0;
  if (x > (std::uint64_t{1} << 42)) throw ConfigError("density too large for exact schedule arithmetic");
  using u128 = unsigned __int128;
  const u128 cube = u128(x) * x * x;
  auto fourth = [](u128 r) { return r * r * r * r; };
  auto r = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(x), 0.75)));
  while (r > 0 && fourth(r) > cube) --r;
  while (fourth(u128(r) + 1) <= cube) ++r;
  return r;
}

}  // namespace detail

/// Per-round densities and slicing thresholds for slice-and-spread.
///
/// Index 0 is the initial placement: mu[0] = floor(m/n), tau[0] = 0. Rounds
/// 1..rounds shrink the residual density as mu[t] = floor(mu[t-1]^(3/4)) and
/// slice at tau[t] = mu[0] - mu[t].
struct Schedule {
  std::uint64_t n = 1;
  int rounds = 0;          // executed rounds
  int nominal_rounds = 0;  // ceil(log_{4/3} log2 mu), before the mu_t <= 2 stop
  std::vector<std::uint64_t> mu;
  std::vector<std::uint64_t> tau;
  // round_weight_prefix[t] = mu[0] + ... + mu[t-1]; weight of round t is mu[t-1].
  std::vector<std::uint64_t> round_weight_prefix;

  std::uint64_t m_at(int t) const { return mu.at(t) * n; }
  std::uint64_t total_round_weight() const { return round_weight_prefix.back(); }
};

inline Schedule build_schedule(const Config& cfg) {
  cfg.validate();
  Schedule s;
  s.n = cfg.n;
  const std::uint64_t mu0 = cfg.mu_floor();
  s.mu.push_back(mu0);
  s.tau.push_back(0);
  s.round_weight_prefix.push_back(0);
  if (mu0 < 4) return s;

  const double inner = std::log2(static_cast<double>(mu0));
  s.nominal_rounds = static_cast<int>(std::ceil(std::log(inner) / std::log(4.0 / 3.0)));

  for (int t = 1; t <= s.nominal_rounds; ++t) {
    const std::uint64_t next = detail::floor_pow_three_quarters(s.mu.back());
    s.round_weight_prefix.push_back(s.round_weight_prefix.back() + s.mu.back());
    s.mu.push_back(next);
    s.tau.push_back(mu0 - next);
    s.rounds = t;
    if (next <= 2) break;
  }
  return s;
}

}  // namespace hi2c
