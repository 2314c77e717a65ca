#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hi2c/core.hpp"
#include "hi2c/oracle.hpp"

namespace hi2c {

/// Sorted, duplicate-free ball ids.
using BallSet = std::vector<BallId>;

inline BallSet canonical_set(std::span<const BallId> balls) {
  BallSet s(balls.begin(), balls.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("ball set has duplicates");
  if (!s.empty() && is_swap_dummy(s.back())) throw std::invalid_argument("ball id in the reserved swap range");
  return s;
}

namespace detail {

inline BallSet pad_to(std::span<const BallId> s, std::uint64_t target, const Config& cfg) {
  if (s.size() > cfg.m) throw CapacityError("ball set exceeds capacity m");
  BallSet out = canonical_set(s);
  if (out.size() >= target) return out;
  if (!out.empty() && !is_real(out.back())) throw std::invalid_argument("cannot pad a set that already holds dummies");
  const std::uint64_t missing = target - out.size();
  out.reserve(target);
  for (std::uint64_t k = 0; k < missing; ++k) out.push_back(pad_dummy_id(k));
  return out;
}

}  // namespace detail

/// s plus the reserved dummies d_0..d_{m-|s|-1}; the result has exactly m balls.
inline BallSet pad_to_capacity(std::span<const BallId> s, const Config& cfg) { return detail::pad_to(s, cfg.m, cfg); }

/// The set an allocator actually works on. Sets of size m-1 or m are used
/// as they are, smaller sets are padded up to m-1. Every allocator input is
/// therefore of size m-1 or m, and a real insertion or deletion moves
/// between neighbouring padded sets or swaps one dummy for one real ball.
inline BallSet prepare_for_allocation(std::span<const BallId> s, const Config& cfg) {
  const std::uint64_t target = cfg.m - 1;
  return detail::pad_to(s, target, cfg);
}

struct Placement {
  BallId ball = 0;
  Bin bin = 0;
  Choice choice = Choice::first;

  bool dummy() const { return !is_real(ball); }
  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Ball -> bin map with the hash used, sorted by ball id.
struct Allocation {
  Config cfg;
  std::vector<Placement> entries;

  const Placement* find(BallId x) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), x,
                               [](const Placement& p, BallId b) { return p.ball < b; });
    return (it != entries.end() && it->ball == x) ? &*it : nullptr;
  }
  std::size_t size() const { return entries.size(); }
  friend bool operator==(const Allocation& a, const Allocation& b) {
    return a.cfg.n == b.cfg.n && a.cfg.m == b.cfg.m && a.entries == b.entries;
  }
};

struct LoadVector {
  std::vector<std::uint64_t> counts;
  bool includes_dummies = true;

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
  std::uint64_t max() const { return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end()); }
};

inline LoadVector loads(const Allocation& a, bool count_dummies = true) {
  LoadVector lv;
  lv.includes_dummies = count_dummies;
  lv.counts.assign(a.cfg.n, 0);
  for (const auto& p : a.entries) {
    if (!count_dummies && p.dummy()) continue;
    lv.counts.at(p.bin) += 1;
  }
  return lv;
}

/// max_i l_i - m/n; negative when every bin is below the average.
inline Rational overload(const LoadVector& lv, const Config& cfg) {
  const auto n = static_cast<std::int64_t>(cfg.n);
  return Rational::make(static_cast<std::int64_t>(lv.max()) * n - static_cast<std::int64_t>(cfg.m), n);
}

/// sum_i max(l_i - m/n, 0).
inline Rational cumulative_overload(const LoadVector& lv, const Config& cfg) {
  const auto n = static_cast<std::int64_t>(cfg.n);
  const auto m = static_cast<std::int64_t>(cfg.m);
  std::int64_t excess = 0;
  for (auto c : lv.counts) excess += std::max<std::int64_t>(static_cast<std::int64_t>(c) * n - m, 0);
  return Rational::make(excess, n);
}

/// 1 + number of shared balls whose bin differs. Padding dummies present in
/// both allocations count as shared balls. The real balls of the two sets
/// must differ in at most one ball.
inline std::uint64_t recourse(const Allocation& a, const Allocation& b) {
  std::uint64_t moved = 0;
  std::uint64_t real_difference = 0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->ball < ib->ball)) {
      real_difference += is_real(ia->ball) ? 1 : 0;
      ++ia;
    } else if (ia == a.entries.end() || ib->ball < ia->ball) {
      real_difference += is_real(ib->ball) ? 1 : 0;
      ++ib;
    } else {
      moved += ia->bin != ib->bin ? 1 : 0;
      ++ia;
      ++ib;
    }
  }
  if (real_difference > 1) throw std::invalid_argument("recourse needs neighbouring sets");
  return 1 + moved;
}

/// Every ball sits at the hash its choice names.
template <BallOracle O>
bool allowable(const Allocation& a, const O& oracle) {
  for (const auto& p : a.entries) {
    const Bin want = p.choice == Choice::first ? oracle.hash1(p.ball, a.cfg.n) : oracle.hash2(p.ball, a.cfg.n);
    if (want != p.bin) return false;
  }
  return true;
}

/// One "ball bin choice" line per entry in ball order. Byte equality of
/// two serialisations is the history-independence check.
inline std::string to_text(const Allocation& a) {
  std::string out;
  out.reserve(a.entries.size() * 28);
  for (const auto& p : a.entries) {
    out += std::to_string(p.ball);
    out += ' ';
    out += std::to_string(p.bin);
    out += ' ';
    out += p.choice == Choice::first ? '1' : '2';
    out += '\n';
  }
  return out;
}

inline Allocation from_text(const std::string& text, const Config& cfg) {
  Allocation a{cfg, {}};
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    Placement p;
    unsigned choice = 0;
    if (!(fields >> p.ball >> p.bin >> choice) || (choice != 1 && choice != 2) || p.bin >= cfg.n)
      throw std::invalid_argument("malformed allocation line: " + line);
    p.choice = static_cast<Choice>(choice);
    if (!a.entries.empty() && a.entries.back().ball >= p.ball)
      throw std::invalid_argument("allocation lines must be strictly increasing by ball");
    a.entries.push_back(p);
  }
  return a;
}

}  // namespace hi2c
