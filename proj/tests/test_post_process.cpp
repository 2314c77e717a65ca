#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "hi2c/harness/workload.hpp"
#include "hi2c/post_process.hpp"
#include "scripted_oracle.hpp"

using namespace hi2c;

namespace {

const MasterSeed kSeed = MasterSeed::from_hex(kDefaultSeedHex);

Allocation at_bins(const Config& cfg, const std::vector<std::pair<BallId, Bin>>& placements) {
  Allocation a{cfg, {}};
  for (auto [x, b] : placements) a.entries.push_back({x, b, Choice::first});
  std::sort(a.entries.begin(), a.entries.end(), [](auto& p, auto& q) { return p.ball < q.ball; });
  return a;
}

}  // namespace

TEST(ExtractB, NothingAboveAverage) {
  const Config cfg(2, 6);
  EXPECT_TRUE(extract_B(at_bins(cfg, {{1, 0}, {2, 0}, {3, 1}}), cfg).empty());
}

TEST(ExtractB, LargestIdsAboveFloor) {
  const Config cfg(2, 7);  // floor(mu) = 3
  const auto a = at_bins(cfg, {{10, 0}, {4, 0}, {7, 0}, {2, 0}, {9, 0}, {1, 1}});
  EXPECT_EQ(extract_B(a, cfg), (BallSet{9, 10}));
}

TEST(ExtractB, SizeIsFloorCumulativeOverload) {
  const Oracle o(kSeed);
  const Config cfg(64, 64 * 20 + 17);
  harness::Rng rng(kSeed.derive("extract", 0));
  const auto a = allocate_slice_spread(harness::random_set(rng, cfg.m), cfg, o).allocation;
  std::uint64_t excess = 0;
  for (auto l : loads(a).counts) excess += l > cfg.mu_floor() ? l - cfg.mu_floor() : 0;
  EXPECT_EQ(extract_B(a, cfg).size(), excess);
}

TEST(Classify, MuThousandTypeTwo) {
  const Config cfg(1, 1000);
  EXPECT_EQ(classify_count(101, 2, cfg), BinClass::overloaded);
  EXPECT_EQ(classify_count(100, 2, cfg), BinClass::neutral);
  EXPECT_EQ(classify_count(99, 2, cfg), BinClass::underloaded);
  EXPECT_EQ(classify_count(891, 1, cfg), BinClass::overloaded);
  EXPECT_EQ(classify_count(890, 1, cfg), BinClass::neutral);
  EXPECT_EQ(classify_count(889, 1, cfg), BinClass::underloaded);
  EXPECT_EQ(classify_count(11, 3, cfg), BinClass::overloaded);
  EXPECT_EQ(classify_count(10, 3, cfg), BinClass::neutral);
  EXPECT_EQ(classify_count(9, 3, cfg), BinClass::underloaded);
}

TEST(Classify, ZeroIsUnderloaded) {
  for (std::uint64_t m : {1u, 7u, 100u})
    for (int j = 1; j <= 3; ++j) EXPECT_EQ(classify_count(0, j, Config(1, m)), BinClass::underloaded);
}

TEST(Classify, FractionalDensity) {
  // mu = 1000/3; type 2 threshold (0.1001)(333.33..) = 33.3666..
  const Config cfg(3, 1000);
  EXPECT_EQ(classify_count(34, 2, cfg), BinClass::overloaded);
  EXPECT_EQ(classify_count(33, 2, cfg), BinClass::underloaded);  // 33 <= 33.3
}

TEST(FailSets, BalancedCensusGivesEmptySets) {
  hi2c::testing::ScriptedOracle o;
  BallSet set;
  for (BallId x = 0; x < 100; ++x) {
    o.set(x, 0, 0, x < 89 ? BallType::one : x < 99 ? BallType::two : BallType::three);
    set.push_back(x);
  }
  const auto fs = build_fail_sets(set, Config(1, 100), o);
  ASSERT_EQ(fs.sets.size(), 18u);
  for (const auto& f : fs.sets) EXPECT_TRUE(f.members.empty()) << f.name();
  EXPECT_TRUE(fs.all.empty());
}

TEST(FailSets, OrderAndNames) {
  hi2c::testing::ScriptedOracle o;
  const auto fs = build_fail_sets(BallSet{}, Config(1, 1), o);
  std::vector<std::string> names;
  for (const auto& f : fs.sets) names.push_back(f.name());
  const std::vector<std::string> want = {
      "X(2,1,1,1)", "X(2,1,1,2)", "X(2,1,2,1)", "X(2,1,2,2)", "X(3,1,1,1)", "X(3,1,1,2)",
      "X(3,1,2,1)", "X(3,1,2,2)", "X(3,2,1,1)", "X(3,2,1,2)", "X(3,2,2,1)", "X(3,2,2,2)",
      "Y(1,1)",     "Y(1,2)",     "Y(2,1)",     "Y(2,2)",     "Y(3,1)",     "Y(3,2)"};
  EXPECT_EQ(names, want);
}

TEST(FailSets, MembershipReplaysFromCensus) {
  const Oracle o(kSeed);
  const Config cfg = Config::from_mu(32, 100);
  harness::Rng rng(kSeed.derive("failsets", 0));
  const auto set = prepare_for_allocation(harness::random_set(rng, cfg.m - 5), cfg);
  const auto infos = ball_infos(set, cfg, o);
  const auto c = census(infos, cfg);
  const auto cls = classify_bins(c, cfg);
  const auto fs = build_fail_sets(infos, cls);
  // Census replay: direct counts per (bin, type, hash).
  std::map<std::tuple<Bin, int, int>, std::uint64_t> direct;
  for (BallId x : set) {
    ++direct[{o.hash1(x, cfg.n), type_index(o.ball_type(x)), 1}];
    ++direct[{o.hash2(x, cfg.n), type_index(o.ball_type(x)), 2}];
  }
  for (Bin i = 0; i < cfg.n; ++i)
    for (int j = 1; j <= 3; ++j)
      for (int k = 1; k <= 2; ++k) EXPECT_EQ(c.count(i, j, k), (direct[{i, j, k}]));
  // Membership replay with the raw rational thresholds.
  const double mu = 100.0;
  const double p[4] = {0, 0.89, 0.10, 0.01};
  BallSet uni;
  bool overlap = false;
  for (const auto& f : fs.sets) {
    for (const auto& x : infos) {
      const Bin b = f.c == 1 ? x.h1 : x.h2;
      bool want = type_index(x.type) == f.a;
      if (f.kind == 'X') want = want && double(c.count(b, f.b, f.d)) <= (p[f.b] - 0.0001) * mu;
      else want = want && double(c.count(b, f.a, f.c)) >= (p[f.a] + 0.0001) * mu;
      EXPECT_EQ(std::binary_search(f.members.begin(), f.members.end(), x.ball), want);
    }
    for (BallId x : f.members) {
      if (std::binary_search(uni.begin(), uni.end(), x)) overlap = true;
    }
    uni.insert(uni.end(), f.members.begin(), f.members.end());
    std::sort(uni.begin(), uni.end());
  }
  uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
  EXPECT_EQ(uni, fs.all);
  EXPECT_TRUE(overlap);
}

namespace {

// Bin 0: balls 1, 2 (Type 2) and 3..6 (Type 1); B = {4, 5, 6}.
// Bin 1: balls 10, 11, 12 (Type 1). Bin 2: ball 20 (Type 2).
struct SwapFixture {
  hi2c::testing::ScriptedOracle o;
  Config cfg{3, 30};
  Allocation a;
  SwapFixture() {
    o.set(1, 0, 1, BallType::two).set(2, 0, 1, BallType::two);
    for (BallId x = 3; x <= 6; ++x) o.set(x, 0, 2);
    for (BallId x = 10; x <= 12; ++x) o.set(x, 1, 2);
    o.set(20, 2, 0, BallType::two);
    o.tape[{0, 1, 0}] = 2;
    o.tape[{1, 2, 0}] = 0;
    o.tape[{2, 2, 0}] = 1;
    a = at_bins(cfg, {{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}, {10, 1}, {11, 1}, {12, 1}, {20, 2}});
  }
};

}  // namespace

TEST(TwoPhaseSwap, TooFewTypeTwoBallsNeedsDummy) {
  SwapFixture f;
  const auto s = two_phase_swap(f.a, BallSet{4, 5, 6}, f.cfg, f.o);
  EXPECT_EQ(s.p1_real, (BallSet{1, 2}));
  ASSERT_EQ(s.p1_dummies.size(), 1u);
  EXPECT_EQ(s.p1_dummies[0].bin, 0u);
  EXPECT_EQ(s.p1_dummies[0].tape, 0u);
  EXPECT_EQ(s.p1_dummies[0].second, 2u);
  EXPECT_EQ(s.phase1_failures[0], 1u);
  EXPECT_EQ(s.after.find(1)->bin, 1u);
  EXPECT_EQ(s.after.find(1)->choice, Choice::second);
  // Two landings in bin 1 take its two smallest Type 1 balls.
  EXPECT_EQ(s.bprime_real, (BallSet{10, 11}));
  // The dummy landing in bin 2 finds no Type 1 ball there.
  ASSERT_EQ(s.bprime_dummies.size(), 1u);
  EXPECT_EQ(s.bprime_dummies[0].bin, 2u);
  EXPECT_EQ(s.bprime_dummies[0].second, 1u);
  EXPECT_EQ(s.phase2_failures[2], 1u);
  EXPECT_EQ(s.B.size(), s.p1_size());
  EXPECT_EQ(s.p1_size(), s.bprime_size());
  // Edges: residence then fresh second endpoint.
  ASSERT_EQ(s.bprime_edges.size(), 3u);
  EXPECT_EQ(s.bprime_edges[0], (Edge{10, 1, 2}));
  EXPECT_EQ(s.bprime_edges[2].ball, s.bprime_dummies[0].id);
  // B itself stays put.
  for (BallId x : {4, 5, 6}) EXPECT_EQ(s.after.find(x)->bin, 0u);
}

TEST(TwoPhaseSwap, EmptyBIsIdentity) {
  SwapFixture f;
  const auto s = two_phase_swap(f.a, BallSet{}, f.cfg, f.o);
  EXPECT_EQ(s.after, f.a);
  EXPECT_EQ(s.p1_size(), 0u);
  EXPECT_EQ(s.bprime_size(), 0u);
}

TEST(TwoPhaseSwap, NoTypeOneBallsMeansPhaseTwoDummies) {
  hi2c::testing::ScriptedOracle o;
  const Config cfg(2, 20);
  o.set(1, 0, 1, BallType::two).set(2, 0, 1, BallType::two).set(3, 0, 1).set(4, 0, 1);
  o.set(7, 1, 0, BallType::three);
  const auto a = at_bins(cfg, {{1, 0}, {2, 0}, {3, 0}, {4, 0}, {7, 1}});
  const auto s = two_phase_swap(a, BallSet{3, 4}, cfg, o);
  EXPECT_EQ(s.p1_real, (BallSet{1, 2}));
  EXPECT_TRUE(s.bprime_real.empty());
  EXPECT_EQ(s.bprime_dummies.size(), 2u);
  EXPECT_EQ(s.phase2_failures[1], 2u);
  EXPECT_NE(s.bprime_dummies[0].id, s.bprime_dummies[1].id);
}

TEST(TwoPhaseSwap, RejectsForeignB) {
  SwapFixture f;
  EXPECT_THROW(two_phase_swap(f.a, BallSet{99}, f.cfg, f.o), std::invalid_argument);
}

TEST(FSafe, Examples) {
  const Config cfg(4, 400);
  EXPECT_TRUE(fsafe_check(std::vector<std::uint64_t>{}, cfg));
  EXPECT_TRUE(fsafe_check(std::vector<std::uint64_t>{100, 0, 100, 100}, cfg));
  EXPECT_FALSE(fsafe_check(std::vector<std::uint64_t>{101, 0, 0, 0}, cfg));
}

TEST(FSafe, InjectedBallsBreakIt) {
  const Oracle o(kSeed);
  const Config cfg = Config::from_mu(64, 128);
  harness::Rng rng(kSeed.derive("fsafe-inject", 0));
  const auto r = full_allocate(harness::random_set(rng, cfg.m), cfg, o);
  ASSERT_TRUE(r.fsafe);
  SwapState s = r.swap;
  for (std::uint64_t k = 0; k < cfg.mu_floor() + 1; ++k)
    s.after.entries.push_back({kMaxRealBall - k, 0, Choice::first});
  std::sort(s.after.entries.begin(), s.after.entries.end(), [](auto& p, auto& q) { return p.ball < q.ball; });
  EXPECT_FALSE(fsafe_check(fsafe_counts(s, r.fail, cfg), cfg));
}

TEST(Full, EmptySetHasNoRealBalls) {
  const Oracle o(kSeed);
  const Config cfg = Config::from_mu(8, 16);
  const auto r = full_allocate(BallSet{}, cfg, o);
  for (const auto& p : r.allocation.entries) EXPECT_TRUE(is_pad_dummy(p.ball));
  EXPECT_TRUE(allowable(r.allocation, o));
}

TEST(Full, Invariants) {
  for (std::uint64_t mu : {16u, 100u, 128u}) {
    const Oracle o(kSeed.derive("full", mu));
    const Config cfg = Config::from_mu(64, mu);
    harness::Rng rng(kSeed.derive("full-set", mu));
    const auto set = harness::random_set(rng, cfg.m - 1);
    const auto r = full_allocate(set, cfg, o, {true});
    EXPECT_TRUE(allowable(r.allocation, o));
    EXPECT_EQ(r.allocation.size(), set.size());
    for (const auto& p : r.allocation.entries) EXPECT_FALSE(is_swap_dummy(p.ball));
    EXPECT_EQ(r.swap.B.size(), r.swap.p1_size());
    EXPECT_EQ(r.swap.p1_size(), r.swap.bprime_size());
    EXPECT_TRUE(fresh_randomness_ok(r.swap, r.pre.second_hash_evaluated, o));
    EXPECT_TRUE(r.fsafe) << "mu=" << mu;
    const auto reported = loads(r.allocation);
    for (Bin i = 0; i < cfg.n; ++i) EXPECT_LE(reported.counts[i], r.internal_loads.counts[i]);
    EXPECT_EQ(r.bprime_stats.size(), kEcoParts);
    EXPECT_EQ(to_text(full_allocate(set, cfg, o).allocation), to_text(r.allocation));
  }
}

TEST(Full, FinalSetWins) {
  const Oracle o(kSeed);
  const Config cfg = Config::from_mu(32, 64);
  harness::Rng rng(kSeed.derive("final-set", 0));
  const auto set = harness::random_set(rng, cfg.m);
  const auto r = full_allocate(set, cfg, o);
  std::map<BallId, Bin> expected;
  // Balls outside F' and B' keep their post-swap bins.
  for (const auto& p : r.swap.after.entries) expected[p.ball] = p.bin;
  const auto bprime = build_graph(r.swap.bprime_edges, cfg.n);
  const auto ob = eco_orient(bprime, kEcoParts, o);
  for (std::size_t k = 0; k < bprime.edges.size(); ++k)
    if (!is_swap_dummy(bprime.edges[k].ball)) expected[bprime.edges[k].ball] = target(bprime.edges[k], ob.side[k]);
  for (const auto& f : r.fail.sets) {
    std::vector<Edge> edges;
    for (BallId x : f.members) edges.push_back({x, o.hash1(x, cfg.n), o.hash2(x, cfg.n)});
    const auto g = build_graph(edges, cfg.n);
    const auto og = eco_orient(g, kEcoParts, o);
    for (std::size_t k = 0; k < g.edges.size(); ++k) expected[g.edges[k].ball] = target(g.edges[k], og.side[k]);
  }
  for (const auto& p : r.allocation.entries) ASSERT_EQ(p.bin, expected.at(p.ball)) << p.ball;
}

TEST(Full, CapacityViolation) {
  const Oracle o(kSeed);
  EXPECT_THROW(full_allocate(BallSet{1, 2, 3}, Config(1, 2), o), CapacityError);
}
