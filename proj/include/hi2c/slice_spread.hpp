#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hi2c/model.hpp"
#include "hi2c/oracle.hpp"
#include "hi2c/schedule.hpp"

namespace hi2c {

/// Bookkeeping for one round, measured just before its spreading stage.
/// Round 0 is the initial throw: nothing in the bins, every ball thrown.
struct RoundRecord {
  int round = 0;
  std::uint64_t tau = 0;
  std::uint64_t rethrown = 0;     // |R_t|
  std::uint64_t in_bins = 0;      // w
  std::uint64_t under_error = 0;  // E-_t
  std::uint64_t over_error = 0;   // E+_t
};

struct RoundDiagnostics {
  std::uint64_t ball_count = 0;
  std::uint64_t n = 0;
  std::vector<RoundRecord> rounds;

  /// |R_t| = |S| - n*tau_t - E+_t + E-_t and w = n*tau_t + E+_t - E-_t, for every round.
  bool accounting_holds() const {
    for (const auto& r : rounds) {
      const auto lhs = static_cast<__int128>(r.in_bins);
      const auto rhs = static_cast<__int128>(n) * r.tau + r.over_error - static_cast<__int128>(r.under_error);
      if (lhs != rhs) return false;
      if (static_cast<__int128>(r.rethrown) != static_cast<__int128>(ball_count) - rhs) return false;
    }
    return true;
  }
};

/// (E-, E+) of a load vector against the round-t threshold.
inline std::pair<std::uint64_t, std::uint64_t> diagnostics_errors(const LoadVector& pre_spread, const Schedule& sched,
                                                                  int t) {
  const std::uint64_t tau = sched.tau.at(t);
  std::uint64_t under = 0;
  std::uint64_t over = 0;
  for (auto l : pre_spread.counts) {
    if (l < tau) under += tau - l;
    else over += l - tau;
  }
  return {under, over};
}

struct SliceSpreadOptions {
  /// Keep the load vector at the start of every round, plus the final one.
  bool record_round_loads = false;
};

struct SliceSpreadResult {
  Allocation allocation;
  RoundDiagnostics diagnostics;
  Schedule schedule;
  /// Balls whose second hash was evaluated (the rethrown ones), sorted.
  std::vector<BallId> second_hash_evaluated;
  /// round_loads[t-1] = loads at the start of round t; the last entry is the final state.
  std::vector<std::vector<std::uint64_t>> round_loads;
};

template <BallOracle O>
SliceSpreadResult allocate_slice_spread(std::span<const BallId> balls, const Config& cfg, const O& oracle,
                                        SliceSpreadOptions opts = {}) {
  const BallSet set = prepare_for_allocation(balls, cfg);
  SliceSpreadResult r;
  r.schedule = build_schedule(cfg);
  const Schedule& sched = r.schedule;
  r.allocation.cfg = cfg;
  r.diagnostics.ball_count = set.size();
  r.diagnostics.n = cfg.n;

  auto& entries = r.allocation.entries;
  entries.reserve(set.size());
  std::vector<std::uint64_t> load(cfg.n, 0);

  struct Candidate {
    int round;
    Bin bin;
    std::uint32_t index;  // into entries
  };
  std::vector<Candidate> candidates;
  for (BallId x : set) {
    const Bin b1 = oracle.hash1(x, cfg.n);
    entries.push_back({x, b1, Choice::first});
    ++load[b1];
    if (auto t = oracle.round_of(x, sched))
      candidates.push_back({*t, b1, static_cast<std::uint32_t>(entries.size() - 1)});
  }
  // Ball order is preserved inside each (round, bin) group.
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.round != b.round ? a.round < b.round : a.bin < b.bin;
  });

  r.diagnostics.rounds.push_back({0, 0, set.size(), 0, 0, 0});

  std::vector<std::uint32_t> rethrow;
  auto group = candidates.begin();
  for (int t = 1; t <= sched.rounds; ++t) {
    if (opts.record_round_loads) r.round_loads.push_back(load);
    const std::uint64_t tau = sched.tau[t];
    rethrow.clear();
    while (group != candidates.end() && group->round == t) {
      auto end = group;
      while (end != candidates.end() && end->round == t && end->bin == group->bin) ++end;
      const Bin i = group->bin;
      const std::uint64_t slack = load[i] > tau ? load[i] - tau : 0;
      const auto evict = std::min<std::uint64_t>(static_cast<std::uint64_t>(end - group), slack);
      for (std::uint64_t k = 0; k < evict; ++k) rethrow.push_back(group[k].index);
      load[i] -= evict;
      group = end;
    }

    RoundRecord rec{t, tau, rethrow.size(), 0, 0, 0};
    for (auto l : load) {
      rec.in_bins += l;
      if (l < tau) rec.under_error += tau - l;
      else rec.over_error += l - tau;
    }
    r.diagnostics.rounds.push_back(rec);

    for (auto idx : rethrow) {
      Placement& p = entries[idx];
      p.bin = oracle.hash2(p.ball, cfg.n);
      p.choice = Choice::second;
      ++load[p.bin];
      r.second_hash_evaluated.push_back(p.ball);
    }
  }
  if (opts.record_round_loads) r.round_loads.push_back(load);
  std::sort(r.second_hash_evaluated.begin(), r.second_hash_evaluated.end());
  return r;
}

inline std::string diagnostics_to_json(const RoundDiagnostics& d) {
  std::string out = "{\"ball_count\":" + std::to_string(d.ball_count) + ",\"n\":" + std::to_string(d.n) +
                    ",\"rounds\":[";
  for (std::size_t k = 0; k < d.rounds.size(); ++k) {
    const auto& r = d.rounds[k];
    if (k) out += ',';
    out += "{\"round\":" + std::to_string(r.round) + ",\"tau\":" + std::to_string(r.tau) +
           ",\"rethrown\":" + std::to_string(r.rethrown) + ",\"in_bins\":" + std::to_string(r.in_bins) +
           ",\"under_error\":" + std::to_string(r.under_error) + ",\"over_error\":" + std::to_string(r.over_error) +
           "}";
  }
  out += "]}";
  return out;
}

}  // namespace hi2c
