#pragma once

// Measurements shared by the acceptance binary and the calibration pilot.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "hi2c/harness/two_worlds.hpp"
#include "hi2c/hi2c.hpp"

namespace hi2c::acceptance {

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : (xs[h - 1] + xs[h]) / 2;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return xs.empty() ? 0 : s / static_cast<double>(xs.size());
}

inline BallSet with_ball(BallSet s, BallId x) {
  s.insert(std::upper_bound(s.begin(), s.end(), x), x);
  return s;
}

/// Slice-and-spread on a full random set; cumulative overload / n per trial.
struct CumulativeRun {
  std::vector<double> per_n;
  bool accounting = true;
};

inline CumulativeRun cumulative_overload_runs(const MasterSeed& seed, std::uint64_t n, std::uint64_t mu,
                                              std::uint64_t trials) {
  const Config cfg = Config::from_mu(n, mu);
  CumulativeRun out;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const Oracle oracle(seed.derive("cumulative", mu * 1000 + t));
    harness::Rng rng(seed.derive("cumulative-set", mu * 1000 + t));
    const auto r = allocate_slice_spread(harness::random_set(rng, cfg.m), cfg, oracle);
    out.accounting = out.accounting && r.diagnostics.accounting_holds();
    out.per_n.push_back(cumulative_overload(loads(r.allocation), cfg).to_double() / static_cast<double>(n));
  }
  return out;
}

/// Full allocator on neighbouring sets: the max overload of each base world
/// and the recourse between the two worlds.
struct FullSweep {
  std::vector<double> overload;
  std::vector<double> recourse;
  bool fsafe = true;
};

inline FullSweep full_sweep(const MasterSeed& seed, std::uint64_t n, std::uint64_t mu, std::uint64_t trials,
                            std::uint64_t pairs_per_trial) {
  const Config cfg = Config::from_mu(n, mu);
  FullSweep out;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const Oracle oracle(seed.derive("full", mu * 1000 + t));
    harness::Rng rng(seed.derive("full-sets", mu * 1000 + t));
    for (std::uint64_t k = 0; k < pairs_per_trial; ++k) {
      const auto pair = harness::sample_pair(cfg, oracle, rng, k);
      const auto r0 = full_allocate(pair.base, cfg, oracle);
      const auto r1 = full_allocate(with_ball(pair.base, pair.extra), cfg, oracle);
      out.fsafe = out.fsafe && r0.fsafe && r1.fsafe;
      out.overload.push_back(overload(loads(r0.allocation), cfg).to_double());
      out.recourse.push_back(static_cast<double>(recourse(r0.allocation, r1.allocation)));
    }
  }
  return out;
}

/// Worst cycle count of any component in the ECO subgraphs of B' and of the
/// fail-set graphs, and the mean component size (edges) pooled over them.
struct ComponentRun {
  std::vector<double> max_cycles;
  std::vector<double> mean_edges;
};

inline ComponentRun component_runs(const MasterSeed& seed, std::uint64_t n, std::uint64_t mu, std::uint64_t trials) {
  const Config cfg = Config::from_mu(n, mu);
  ComponentRun out;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const Oracle oracle(seed.derive("components", t));
    harness::Rng rng(seed.derive("components-set", t));
    const auto r = full_allocate(harness::random_set(rng, cfg.m - rng.below(2)), cfg, oracle, {true});
    std::uint64_t cycles = 0, comps = 0;
    double edges = 0;
    auto add = [&](const ComponentStats& s) {
      cycles = std::max(cycles, s.max_cycles);
      comps += s.component_count;
      edges += s.mean_edges * static_cast<double>(s.component_count);
    };
    for (const auto& s : r.bprime_stats) add(s);
    for (const auto& s : r.fail_stats) add(s);
    out.max_cycles.push_back(static_cast<double>(cycles));
    out.mean_edges.push_back(comps ? edges / static_cast<double>(comps) : 0);
  }
  return out;
}

}  // namespace hi2c::acceptance
