#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hi2c/allocators.hpp"
#include "hi2c/harness/workload.hpp"

namespace hi2c::harness {

/// One neighbouring pair: world 0 holds S, world 1 holds S plus extra.
struct WorldPair {
  BallSet base;
  BallId extra = 0;
};

/// |S| = m - 1 with fresh random ids. Half the pairs (odd index) draw the
/// extra ball among round-assigned balls so the two-ball round is exercised.
template <BallOracle O>
WorldPair sample_pair(const Config& cfg, const O& oracle, Rng& rng, std::uint64_t index) {
  const Schedule sched = build_schedule(cfg);
  WorldPair p;
  p.base = random_set(rng, cfg.m - 1);
  const bool want_round = (index % 2) == 1 && sched.rounds > 0;
  for (;;) {
    const BallId x = rng.next() & kMaxRealBall;
    if (std::binary_search(p.base.begin(), p.base.end(), x)) continue;
    if (want_round && !oracle.round_of(x, sched)) continue;
    p.extra = x;
    return p;
  }
}

struct PairOutcome {
  std::uint64_t recourse = 0;
  int rounds = 0;
  std::optional<int> extra_round;
  /// d[t-1] = discrepancy at the start of round t, last entry the final state.
  std::vector<std::uint64_t> discrepancy;
  std::vector<std::string> violations;
};

inline std::uint64_t discrepancy(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::uint64_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  return d;
}

/// Runs slice-and-spread in both worlds with one oracle and checks the
/// discrepancy chain and the 3T + 3 recourse bound.
template <BallOracle O>
PairOutcome run_slice_pair(const WorldPair& p, const Config& cfg, const O& oracle) {
  BallSet world1 = p.base;
  world1.insert(std::upper_bound(world1.begin(), world1.end(), p.extra), p.extra);
  const SliceSpreadOptions opts{true};
  const auto r0 = allocate_slice_spread(p.base, cfg, oracle, opts);
  const auto r1 = allocate_slice_spread(world1, cfg, oracle, opts);

  PairOutcome out;
  out.rounds = r0.schedule.rounds;
  out.extra_round = oracle.round_of(p.extra, r0.schedule);
  out.recourse = recourse(r0.allocation, r1.allocation);
  for (std::size_t k = 0; k < r0.round_loads.size(); ++k)
    out.discrepancy.push_back(discrepancy(r0.round_loads[k], r1.round_loads[k]));

  auto fail = [&](const std::string& what) { out.violations.push_back(what); };
  if (out.rounds > 0 && out.discrepancy.front() != 1)
    fail("d(1) = " + std::to_string(out.discrepancy.front()) + ", expected 1");
  for (int t = 1; t < static_cast<int>(out.discrepancy.size()); ++t) {
    const auto before = out.discrepancy[t - 1];
    const auto after = out.discrepancy[t];
    const bool special = out.extra_round && *out.extra_round == t;
    const auto bound = special ? before + 2 : before;
    if (after > bound)
      fail("d(" + std::to_string(t + 1) + ") = " + std::to_string(after) + " exceeds " + std::to_string(bound) +
           (special ? " at the extra ball's round" : ""));
  }
  const std::uint64_t limit = 3 * static_cast<std::uint64_t>(out.rounds) + 3;
  if (out.recourse > limit)
    fail("recourse " + std::to_string(out.recourse) + " exceeds " + std::to_string(limit));
  return out;
}

/// Full dump of a failing pair.
inline std::string describe(const WorldPair& p, const PairOutcome& o) {
  std::string s = "extra=" + std::to_string(p.extra) + " |S|=" + std::to_string(p.base.size()) +
                  " rounds=" + std::to_string(o.rounds) +
                  " extra_round=" + (o.extra_round ? std::to_string(*o.extra_round) : std::string("none")) +
                  " recourse=" + std::to_string(o.recourse) + " d=[";
  for (std::size_t k = 0; k < o.discrepancy.size(); ++k) s += (k ? "," : "") + std::to_string(o.discrepancy[k]);
  s += "]";
  for (const auto& v : o.violations) s += "; " + v;
  return s;
}

struct TwoWorldsReport {
  std::vector<PairOutcome> pairs;
  std::uint64_t violation_count() const {
    std::uint64_t c = 0;
    for (const auto& p : pairs) c += p.violations.empty() ? 0 : 1;
    return c;
  }
};

/// Slice-and-spread pairs are checked; for the full allocator only the
/// recourse is recorded.
inline TwoWorldsReport two_worlds(AllocatorKind kind, const Config& cfg, const MasterSeed& seed,
                                  std::uint64_t pair_count) {
  if (kind != AllocatorKind::slice_spread && kind != AllocatorKind::full)
    throw ConfigError("two-worlds needs slice-spread or full");
  const Oracle oracle(seed.derive("two-worlds", 0));
  Rng rng(seed.derive("two-worlds-sets", 0));
  TwoWorldsReport rep;
  for (std::uint64_t k = 0; k < pair_count; ++k) {
    const WorldPair p = sample_pair(cfg, oracle, rng, k);
    if (kind == AllocatorKind::slice_spread) {
      rep.pairs.push_back(run_slice_pair(p, cfg, oracle));
    } else {
      BallSet world1 = p.base;
      world1.insert(std::upper_bound(world1.begin(), world1.end(), p.extra), p.extra);
      PairOutcome o;
      o.recourse = recourse(full_allocate(p.base, cfg, oracle).allocation, full_allocate(world1, cfg, oracle).allocation);
      rep.pairs.push_back(std::move(o));
    }
  }
  return rep;
}

}  // namespace hi2c::harness
