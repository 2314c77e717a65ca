#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hi2c/allocators.hpp"
#include "hi2c/harness/graphs.hpp"
#include "hi2c/harness/history.hpp"
#include "hi2c/harness/two_worlds.hpp"
#include "hi2c/harness/workload.hpp"

namespace hi2c::harness {

struct VerifyParams {
  std::uint64_t n = 0;   // 0 = suite default
  std::uint64_t mu = 0;  // 0 = suite default
  std::uint64_t trials = 0;
  MasterSeed seed = MasterSeed::from_hex(kDefaultSeedHex);
};

struct VerifyResult {
  std::string suite;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::string first_failure;

  explicit VerifyResult(std::string name) : suite(std::move(name)) {}
  bool passed() const { return failures == 0; }
  void check(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (failures++ == 0) first_failure = what;
  }
};

namespace detail {

inline std::uint64_t pick(std::uint64_t value, std::uint64_t fallback) { return value ? value : fallback; }

}  // namespace detail

inline VerifyResult verify_history_independence(const VerifyParams& p) {
  VerifyResult r{"history-independence"};
  const Config cfg = Config::from_mu(detail::pick(p.n, 64), detail::pick(p.mu, 16));
  const auto histories = detail::pick(p.trials, 10);
  const Oracle oracle(p.seed.derive("verify-history", 0));
  Rng rng(p.seed.derive("verify-history-sets", 0));
  const BallSet target = random_set(rng, cfg.m - 1);
  for (auto kind : kAllAllocators) {
    std::string reference;
    for (std::uint64_t h = 0; h < histories; ++h) {
      Table<Oracle> table(kind, cfg, oracle);
      for (const auto& op : random_history(target, cfg, rng, h % 4 == 0 ? 0 : 64)) table.apply(op);
      const std::string bytes = table.serialize();
      if (h == 0) reference = bytes;
      else r.check(bytes == reference, std::string(name_of(kind)) + ": history " + std::to_string(h) + " differs");
    }
  }
  return r;
}

/// Neighbouring HI Greedy allocations differ in exactly one bin, by one.
inline VerifyResult verify_greedy_fact(const VerifyParams& p) {
  VerifyResult r{"greedy-fact"};
  const Config cfg = Config::from_mu(detail::pick(p.n, 128), detail::pick(p.mu, 16));
  const Oracle oracle(p.seed.derive("verify-greedy", 0));
  Rng rng(p.seed.derive("verify-greedy-sets", 0));
  for (std::uint64_t k = 0; k < detail::pick(p.trials, 100); ++k) {
    const WorldPair pair = sample_pair(cfg, oracle, rng, 0);
    BallSet bigger = pair.base;
    bigger.insert(std::upper_bound(bigger.begin(), bigger.end(), pair.extra), pair.extra);
    const auto a = loads(allocate_hi_greedy(pair.base, cfg, oracle, false).allocation).counts;
    const auto b = loads(allocate_hi_greedy(bigger, cfg, oracle, false).allocation).counts;
    std::uint64_t differing = 0;
    bool by_one = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == b[i]) continue;
      ++differing;
      by_one = by_one && b[i] == a[i] + 1;
    }
    r.check(differing == 1 && by_one, "pair " + std::to_string(k) + ": " + std::to_string(differing) + " bins differ");
  }
  return r;
}

inline VerifyResult verify_accounting(const VerifyParams& p) {
  VerifyResult r{"accounting"};
  const Config cfg = Config::from_mu(detail::pick(p.n, 256), detail::pick(p.mu, 64));
  Rng rng(p.seed.derive("verify-accounting-sets", 0));
  for (std::uint64_t k = 0; k < detail::pick(p.trials, 20); ++k) {
    const Oracle oracle(p.seed.derive("verify-accounting", k));
    const auto res = allocate_slice_spread(random_set(rng, cfg.m - rng.below(2)), cfg, oracle);
    r.check(res.diagnostics.accounting_holds(), "run " + std::to_string(k) + ": " + diagnostics_to_json(res.diagnostics));
  }
  return r;
}

inline VerifyResult verify_recourse_bound(const VerifyParams& p) {
  VerifyResult r{"recourse-bound"};
  const Config cfg = Config::from_mu(detail::pick(p.n, 256), detail::pick(p.mu, 16));
  const Oracle oracle(p.seed.derive("verify-recourse", 0));
  Rng rng(p.seed.derive("verify-recourse-sets", 0));
  for (std::uint64_t k = 0; k < detail::pick(p.trials, 100); ++k) {
    const WorldPair pair = sample_pair(cfg, oracle, rng, k);
    const PairOutcome o = run_slice_pair(pair, cfg, oracle);
    r.check(o.violations.empty(), describe(pair, o));
  }
  return r;
}

/// F'-safety, fresh randomness of B' and |B| = |P1| = |B'| after every swap.
inline VerifyResult verify_f_safety(const VerifyParams& p) {
  VerifyResult r{"f-safety"};
  const Config cfg = Config::from_mu(detail::pick(p.n, 512), detail::pick(p.mu, 128));
  Rng rng(p.seed.derive("verify-fsafe-sets", 0));
  for (std::uint64_t k = 0; k < detail::pick(p.trials, 10); ++k) {
    const Oracle oracle(p.seed.derive("verify-fsafe", k));
    const auto res = full_allocate(random_set(rng, cfg.m - rng.below(2)), cfg, oracle);
    const std::string tag = "trial " + std::to_string(k);
    r.check(res.fsafe, tag + ": a bin exceeds m/n non-F' balls");
    r.check(fresh_randomness_ok(res.swap, res.pre.second_hash_evaluated, oracle), tag + ": B' reuses randomness");
    r.check(res.swap.B.size() == res.swap.p1_size() && res.swap.p1_size() == res.swap.bprime_size(),
            tag + ": cardinality chain broken");
  }
  return r;
}

inline VerifyResult verify_orientation(const VerifyParams& p) {
  VerifyResult r{"orientation"};
  Rng rng(p.seed.derive("verify-orientation", 0));
  const std::uint64_t n = detail::pick(p.n, 16);
  for (std::uint64_t k = 0; k < detail::pick(p.trials, 200); ++k) {
    const CuckooGraph g = random_component(rng, n, 10, 8);
    const auto comps = components(g);
    const auto sides = orient_component(g, comps.at(0));
    Orientation o{sides};
    const auto deg = in_degrees(g, o);
    const auto got = *std::max_element(deg.begin(), deg.end());
    const auto want = brute_min_max_indegree(g.edges, g.n);
    r.check(comps.size() == 1 && got == want,
            "component " + std::to_string(k) + ": max in-degree " + std::to_string(got) + ", optimum " +
                std::to_string(want) + "\n" + graph_dump(g, o));
  }
  return r;
}

inline const std::map<std::string, std::function<VerifyResult(const VerifyParams&)>>& verify_suites() {
  static const std::map<std::string, std::function<VerifyResult(const VerifyParams&)>> suites = {
      {"history-independence", verify_history_independence},
      {"greedy-fact", verify_greedy_fact},
      {"accounting", verify_accounting},
      {"recourse-bound", verify_recourse_bound},
      {"f-safety", verify_f_safety},
      {"orientation", verify_orientation},
  };
  return suites;
}

}  // namespace hi2c::harness
