#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hi2c/model.hpp"
#include "hi2c/oracle.hpp"
#include "hi2c/orient.hpp"
#include "hi2c/slice_spread.hpp"

namespace hi2c {

/// Type probabilities in percent, indexed by type - 1.
inline constexpr std::array<std::uint64_t, 3> kTypePercent = {89, 10, 1};
/// Classification slack epsilon = 1 / kEpsilonInverse.
inline constexpr std::uint64_t kEpsilonInverse = 10000;
/// Default number of ECO parts (p^-1).
inline constexpr std::uint32_t kEcoParts = 4;

/// Per-ball hash data, computed once per allocation.
struct BallInfo {
  BallId ball = 0;
  BallType type = BallType::one;
  Bin h1 = 0;
  Bin h2 = 0;
};

template <BallOracle O>
std::vector<BallInfo> ball_infos(std::span<const BallId> set, const Config& cfg, const O& oracle) {
  std::vector<BallInfo> out;
  out.reserve(set.size());
  for (BallId x : set) out.push_back({x, oracle.ball_type(x), oracle.hash1(x, cfg.n), oracle.hash2(x, cfg.n)});
  return out;
}

/// count(i, j, k) = number of set balls of type j with h_k(x) = i.
struct TypedBinCensus {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> counts;

  static std::size_t slot(Bin i, int type, int hash) { return (std::size_t(i) * 3 + (type - 1)) * 2 + (hash - 1); }
  std::uint64_t count(Bin i, int type, int hash) const { return counts.at(slot(i, type, hash)); }
};

inline TypedBinCensus census(std::span<const BallInfo> infos, const Config& cfg) {
  TypedBinCensus c{cfg.n, std::vector<std::uint64_t>(cfg.n * 6, 0)};
  for (const auto& b : infos) {
    ++c.counts[TypedBinCensus::slot(b.h1, type_index(b.type), 1)];
    ++c.counts[TypedBinCensus::slot(b.h2, type_index(b.type), 2)];
  }
  return c;
}

template <BallOracle O>
TypedBinCensus census(std::span<const BallId> padded_set, const Config& cfg, const O& oracle) {
  const auto infos = ball_infos(padded_set, cfg, oracle);
  return census(infos, cfg);
}

enum class BinClass : std::uint8_t { neutral, overloaded, underloaded };

struct BinClassification {
  std::uint64_t n = 0;
  std::vector<BinClass> cls;  // same layout as the census

  BinClass at(Bin i, int type, int hash) const { return cls.at(TypedBinCensus::slot(i, type, hash)); }
  bool overloaded(Bin i, int type) const {
    return at(i, type, 1) == BinClass::overloaded || at(i, type, 2) == BinClass::overloaded;
  }
  bool underloaded(Bin i, int type) const {
    return at(i, type, 1) == BinClass::underloaded || at(i, type, 2) == BinClass::underloaded;
  }
};

/// Overloaded iff count >= (p_j + eps) m/n, underloaded iff count <= (p_j - eps) m/n,
/// compared exactly in integers.
inline BinClass classify_count(std::uint64_t count, int type, const Config& cfg) {
  using u128 = unsigned __int128;
  const u128 scaled = u128(count) * kEpsilonInverse * cfg.n;
  const u128 p = kTypePercent.at(type - 1) * (kEpsilonInverse / 100);  // p_j / eps
  if (scaled >= (p + 1) * cfg.m) return BinClass::overloaded;
  if (p >= 1 && scaled <= (p - 1) * cfg.m) return BinClass::underloaded;
  return BinClass::neutral;
}

inline BinClassification classify_bins(const TypedBinCensus& c, const Config& cfg) {
  BinClassification out{c.n, std::vector<BinClass>(c.counts.size())};
  for (Bin i = 0; i < c.n; ++i)
    for (int j = 1; j <= 3; ++j)
      for (int k = 1; k <= 2; ++k) out.cls[TypedBinCensus::slot(i, j, k)] = classify_count(c.count(i, j, k), j, cfg);
  return out;
}

/// One X^(a,b,c,d) or Y^(a,c) set.
struct FailSet {
  char kind = 'X';
  int a = 0, b = 0, c = 0, d = 0;  // b and d unused for Y
  BallSet members;

  std::string name() const {
    if (kind == 'X')
      return "X(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "," + std::to_string(d) +
             ")";
    return "Y(" + std::to_string(a) + "," + std::to_string(c) + ")";
  }
};

struct FailSets {
  /// X sets in ascending (a, b, c, d), then Y sets in ascending (a, c).
  std::vector<FailSet> sets;
  BallSet all;  // F', sorted

  bool contains(BallId x) const { return std::binary_search(all.begin(), all.end(), x); }
};

inline bool in_fail_set(const FailSet& f, const BallInfo& x, const BinClassification& cls) {
  if (type_index(x.type) != f.a) return false;
  const Bin target = f.c == 1 ? x.h1 : x.h2;
  if (f.kind == 'X') return cls.at(target, f.b, f.d) == BinClass::underloaded;
  return cls.at(target, f.a, f.c) == BinClass::overloaded;
}

inline FailSets build_fail_sets(std::span<const BallInfo> infos, const BinClassification& cls) {
  FailSets fs;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b < a; ++b)
      for (int c = 1; c <= 2; ++c)
        for (int d = 1; d <= 2; ++d) fs.sets.push_back({'X', a, b, c, d, {}});
  for (int a = 1; a <= 3; ++a)
    for (int c = 1; c <= 2; ++c) fs.sets.push_back({'Y', a, 0, c, 0, {}});
  for (const auto& x : infos) {
    bool any = false;
    for (auto& f : fs.sets) {
      if (in_fail_set(f, x, cls)) {
        f.members.push_back(x.ball);
        any = true;
      }
    }
    if (any) fs.all.push_back(x.ball);
  }
  for (auto& f : fs.sets) std::sort(f.members.begin(), f.members.end());
  std::sort(fs.all.begin(), fs.all.end());
  return fs;
}

template <BallOracle O>
FailSets build_fail_sets(std::span<const BallId> padded_set, const Config& cfg, const O& oracle) {
  const auto infos = ball_infos(padded_set, cfg, oracle);
  return build_fail_sets(infos, classify_bins(census(infos, cfg), cfg));
}

/// From every bin holding more than floor(m/n) balls, its excess balls with
/// the largest ids.
inline BallSet extract_B(const Allocation& a, const Config& cfg) {
  const std::uint64_t cap = cfg.mu_floor();
  std::vector<std::vector<BallId>> per_bin(cfg.n);
  for (const auto& p : a.entries) per_bin.at(p.bin).push_back(p.ball);
  BallSet out;
  for (auto& balls : per_bin) {
    if (balls.size() <= cap) continue;
    out.insert(out.end(), balls.end() - static_cast<std::ptrdiff_t>(balls.size() - cap), balls.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// A surrogate created when a bin has too few balls of the needed type.
struct SwapDummy {
  BallId id = 0;
  int phase = 1;
  Bin bin = 0;
  std::uint64_t tape = 0;
  Bin second = 0;
};

struct SwapState {
  BallSet B;
  BallSet p1_real;
  std::vector<SwapDummy> p1_dummies;
  BallSet bprime_real;
  std::vector<SwapDummy> bprime_dummies;
  /// B' as cuckoo-graph edges: u is the residence bin, v the fresh second endpoint.
  std::vector<Edge> bprime_edges;
  std::vector<std::uint64_t> phase1_failures;
  std::vector<std::uint64_t> phase2_failures;
  /// Input allocation with real P1 members moved to their second hash.
  Allocation after;

  std::size_t p1_size() const { return p1_real.size() + p1_dummies.size(); }
  std::size_t bprime_size() const { return bprime_real.size() + bprime_dummies.size(); }
};

template <BallOracle O>
SwapState two_phase_swap(const Allocation& a, std::span<const BallId> B, const Config& cfg, const O& oracle) {
  SwapState s;
  s.B.assign(B.begin(), B.end());
  std::sort(s.B.begin(), s.B.end());
  s.after = a;
  s.phase1_failures.assign(cfg.n, 0);
  s.phase2_failures.assign(cfg.n, 0);

  std::vector<std::uint64_t> k(cfg.n, 0);
  for (BallId x : s.B) {
    const Placement* p = a.find(x);
    if (p == nullptr) throw std::invalid_argument("B holds a ball outside the allocation");
    ++k[p->bin];
  }
  // Residents by type, ascending id (entries are sorted by ball).
  std::vector<std::vector<std::uint32_t>> type2(cfg.n), type1(cfg.n);
  for (std::uint32_t idx = 0; idx < a.entries.size(); ++idx) {
    const Placement& p = a.entries[idx];
    if (is_swap_dummy(p.ball)) continue;
    const auto t = oracle.ball_type(p.ball);
    if (t == BallType::two && k[p.bin] > 0) type2[p.bin].push_back(idx);
    else if (t == BallType::one) type1[p.bin].push_back(idx);
  }

  std::vector<std::uint64_t> landed(cfg.n, 0);
  for (Bin i = 0; i < cfg.n; ++i) {
    if (k[i] == 0) continue;
    const std::uint64_t take = std::min<std::uint64_t>(type2[i].size(), k[i]);
    for (std::uint64_t q = 0; q < take; ++q) {
      Placement& p = s.after.entries[type2[i][q]];
      s.p1_real.push_back(p.ball);
      p.bin = oracle.hash2(p.ball, cfg.n);
      p.choice = Choice::second;
      ++landed[p.bin];
    }
    for (std::uint64_t q = 0; q < k[i] - take; ++q) {
      const Bin second = oracle.dummy_second_hash(i, 1, q, cfg.n);
      s.p1_dummies.push_back({swap_dummy_id(1, i, q), 1, i, q, second});
      ++landed[second];
    }
    s.phase1_failures[i] = k[i] - take;
  }

  for (Bin i = 0; i < cfg.n; ++i) {
    if (landed[i] == 0) continue;
    const std::uint64_t take = std::min<std::uint64_t>(type1[i].size(), landed[i]);
    for (std::uint64_t q = 0; q < take; ++q) {
      const Placement& p = s.after.entries[type1[i][q]];
      s.bprime_real.push_back(p.ball);
      s.bprime_edges.push_back({p.ball, p.bin, oracle.hash2(p.ball, cfg.n)});
    }
    for (std::uint64_t q = 0; q < landed[i] - take; ++q) {
      const Bin second = oracle.dummy_second_hash(i, 2, q, cfg.n);
      const SwapDummy dmy{swap_dummy_id(2, i, q), 2, i, q, second};
      s.bprime_dummies.push_back(dmy);
      s.bprime_edges.push_back({dmy.id, i, second});
    }
    s.phase2_failures[i] = landed[i] - take;
  }
  std::sort(s.p1_real.begin(), s.p1_real.end());
  std::sort(s.bprime_real.begin(), s.bprime_real.end());
  std::sort(s.bprime_edges.begin(), s.bprime_edges.end(), [](const Edge& x, const Edge& y) { return x.ball < y.ball; });
  return s;
}

/// Per bin, the set balls resident after the swap that are neither in F' nor in B'.
inline std::vector<std::uint64_t> fsafe_counts(const SwapState& s, const FailSets& f, const Config& cfg) {
  std::vector<std::uint64_t> counts(cfg.n, 0);
  for (const auto& p : s.after.entries) {
    if (is_swap_dummy(p.ball) || f.contains(p.ball)) continue;
    if (std::binary_search(s.bprime_real.begin(), s.bprime_real.end(), p.ball)) continue;
    ++counts[p.bin];
  }
  return counts;
}

/// Every count at most m/n.
inline bool fsafe_check(std::span<const std::uint64_t> counts, const Config& cfg) {
  return std::all_of(counts.begin(), counts.end(), [&](std::uint64_t c) { return c * cfg.n <= cfg.m; });
}

/// B' draws only unused randomness: real members are Type 1 with an h2
/// never evaluated before, dummies come from distinct tape positions.
template <BallOracle O>
bool fresh_randomness_ok(const SwapState& s, std::span<const BallId> second_hash_evaluated, const O& oracle) {
  for (BallId x : s.bprime_real) {
    if (oracle.ball_type(x) != BallType::one) return false;
    if (std::binary_search(second_hash_evaluated.begin(), second_hash_evaluated.end(), x)) return false;
  }
  std::vector<BallId> ids;
  for (const auto& d : s.p1_dummies) ids.push_back(d.id);
  for (const auto& d : s.bprime_dummies) ids.push_back(d.id);
  std::sort(ids.begin(), ids.end());
  return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

struct FullOptions {
  /// Component statistics of every ECO subgraph of B' and of the fail sets.
  bool component_stats = false;
  std::uint32_t eco_parts = kEcoParts;
};

struct FullResult {
  /// Set balls only; swap dummies are tracked below.
  Allocation allocation;
  SliceSpreadResult pre;
  SwapState swap;
  TypedBinCensus census;
  FailSets fail;
  std::vector<std::uint64_t> fsafe_counts;
  bool fsafe = true;
  /// Loads including P1 dummies at their landing bins and oriented B' dummies.
  LoadVector internal_loads;
  std::vector<ComponentStats> bprime_stats;  // one per ECO part
  std::vector<ComponentStats> fail_stats;    // per fail set, per ECO part
};

namespace detail {

template <BallOracle O>
void collect_eco_stats(const CuckooGraph& g, std::uint32_t parts, const O& oracle, std::vector<ComponentStats>& out) {
  for (const auto& part : eco_partition(g, parts, oracle)) out.push_back(component_stats(part));
}

}  // namespace detail

/// Slice-and-spread, two-phase swapping, ECO orientation of B', then the
/// fail sets in order, the last set containing a ball deciding its bin.
template <BallOracle O>
FullResult full_allocate(std::span<const BallId> balls, const Config& cfg, const O& oracle, FullOptions opts = {}) {
  const BallSet set = prepare_for_allocation(balls, cfg);
  FullResult r;
  r.pre = allocate_slice_spread(set, cfg, oracle);
  r.swap = two_phase_swap(r.pre.allocation, extract_B(r.pre.allocation, cfg), cfg, oracle);

  const auto infos = ball_infos(set, cfg, oracle);
  r.census = census(infos, cfg);
  r.fail = build_fail_sets(infos, classify_bins(r.census, cfg));
  r.fsafe_counts = fsafe_counts(r.swap, r.fail, cfg);
  r.fsafe = fsafe_check(r.fsafe_counts, cfg);

  r.allocation = r.swap.after;
  auto& entries = r.allocation.entries;
  auto info_of = [&](BallId x) -> const BallInfo& {
    return *std::lower_bound(infos.begin(), infos.end(), x,
                             [](const BallInfo& b, BallId id) { return b.ball < id; });
  };
  auto place = [&](BallId x, Bin bin) {
    auto it = std::lower_bound(entries.begin(), entries.end(), x,
                               [](const Placement& p, BallId id) { return p.ball < id; });
    const BallInfo& info = info_of(x);
    it->bin = bin;
    it->choice = bin == info.h1 ? Choice::first : Choice::second;
  };

  std::vector<std::uint64_t> dummy_load(cfg.n, 0);
  for (const auto& d : r.swap.p1_dummies) ++dummy_load[d.second];

  const CuckooGraph bprime = build_graph(r.swap.bprime_edges, cfg.n);
  const Orientation ob = eco_orient(bprime, opts.eco_parts, oracle);
  for (std::size_t k = 0; k < bprime.edges.size(); ++k) {
    const Edge& e = bprime.edges[k];
    const Bin bin = target(e, ob.side[k]);
    if (is_swap_dummy(e.ball)) ++dummy_load[bin];
    else place(e.ball, bin);
  }
  if (opts.component_stats) detail::collect_eco_stats(bprime, opts.eco_parts, oracle, r.bprime_stats);

  for (const auto& f : r.fail.sets) {
    if (f.members.empty()) continue;
    std::vector<Edge> edges;
    edges.reserve(f.members.size());
    for (BallId x : f.members) {
      const BallInfo& info = info_of(x);
      edges.push_back({x, info.h1, info.h2});
    }
    const CuckooGraph g{cfg.n, std::move(edges)};
    const Orientation o = eco_orient(g, opts.eco_parts, oracle);
    for (std::size_t k = 0; k < g.edges.size(); ++k) place(g.edges[k].ball, target(g.edges[k], o.side[k]));
    if (opts.component_stats) detail::collect_eco_stats(g, opts.eco_parts, oracle, r.fail_stats);
  }

  r.internal_loads = loads(r.allocation, true);
  for (Bin i = 0; i < cfg.n; ++i) r.internal_loads.counts[i] += dummy_load[i];
  return r;
}

}  // namespace hi2c
