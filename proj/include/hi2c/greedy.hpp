#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hi2c/model.hpp"
#include "hi2c/oracle.hpp"

namespace hi2c {

/// Every ball at its first hash.
template <BallOracle O>
Allocation allocate_single_choice(std::span<const BallId> balls, const Config& cfg, const O& oracle) {
  const BallSet set = prepare_for_allocation(balls, cfg);
  Allocation a{cfg, {}};
  a.entries.reserve(set.size());
  for (BallId x : set) a.entries.push_back({x, oracle.hash1(x, cfg.n), Choice::first});
  return a;
}

/// One simulated insertion: the loads seen by the ball and where it went.
struct GreedyStep {
  BallId ball = 0;
  Bin first = 0;
  Bin second = 0;
  std::uint64_t first_load = 0;
  std::uint64_t second_load = 0;
  Bin chosen = 0;
};

using GreedyTrace = std::vector<GreedyStep>;

struct GreedyResult {
  Allocation allocation;
  GreedyTrace trace;
};

/// HI Greedy: insert the set in ascending id order, each ball into the less
/// loaded of its two bins, ties to the first hash.
template <BallOracle O>
GreedyResult allocate_hi_greedy(std::span<const BallId> balls, const Config& cfg, const O& oracle,
                                bool record_trace = true) {
  const BallSet set = prepare_for_allocation(balls, cfg);
  GreedyResult r{{cfg, {}}, {}};
  r.allocation.entries.reserve(set.size());
  if (record_trace) r.trace.reserve(set.size());
  std::vector<std::uint64_t> load(cfg.n, 0);
  for (BallId x : set) {
    const Bin b1 = oracle.hash1(x, cfg.n);
    const Bin b2 = oracle.hash2(x, cfg.n);
    const bool take_second = load[b2] < load[b1];
    const Bin chosen = take_second ? b2 : b1;
    if (record_trace) r.trace.push_back({x, b1, b2, load[b1], load[b2], chosen});
    ++load[chosen];
    r.allocation.entries.push_back({x, chosen, take_second ? Choice::second : Choice::first});
  }
  return r;
}

inline std::string trace_to_json_lines(const GreedyTrace& trace) {
  std::string out;
  for (const auto& s : trace) {
    out += "{\"ball\":" + std::to_string(s.ball) + ",\"h1\":" + std::to_string(s.first) +
           ",\"h2\":" + std::to_string(s.second) + ",\"load_h1\":" + std::to_string(s.first_load) +
           ",\"load_h2\":" + std::to_string(s.second_load) + ",\"bin\":" + std::to_string(s.chosen) + "}\n";
  }
  return out;
}

}  // namespace hi2c
