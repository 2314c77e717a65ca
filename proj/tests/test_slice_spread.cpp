#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hi2c/greedy.hpp"
#include "hi2c/harness/workload.hpp"
#include "hi2c/slice_spread.hpp"
#include "scripted_oracle.hpp"

using namespace hi2c;

namespace {

const MasterSeed kSeed = MasterSeed::from_hex(kDefaultSeedHex);

}  // namespace

TEST(Schedule, MuSixteen) {
  const Schedule s = build_schedule(Config::from_mu(10, 16));
  EXPECT_EQ(s.rounds, 3);
  EXPECT_EQ(s.mu, (std::vector<std::uint64_t>{16, 8, 4, 2}));
  EXPECT_EQ(s.tau, (std::vector<std::uint64_t>{0, 8, 12, 14}));
  EXPECT_EQ(s.m_at(1), 80u);
  EXPECT_EQ(s.total_round_weight(), 28u);
}

TEST(Schedule, LargeMu) {
  const Schedule s = build_schedule(Config::from_mu(1, 65536));
  EXPECT_EQ(s.mu[1], 4096u);
  EXPECT_EQ(s.mu[2], 512u);
  EXPECT_EQ(s.tau[1], 61440u);
  EXPECT_EQ(s.tau[2], 65024u);
  EXPECT_EQ(s.rounds, 8);
  EXPECT_EQ(s.mu.back(), 2u);
}

TEST(Schedule, SmallMuHasNoRounds) {
  EXPECT_EQ(build_schedule(Config::from_mu(8, 2)).rounds, 0);
  EXPECT_EQ(build_schedule(Config::from_mu(8, 3)).rounds, 0);
  EXPECT_EQ(build_schedule(Config(8, 4)).rounds, 0);  // mu < 1
}

TEST(Schedule, Invariants) {
  for (std::uint64_t mu = 4; mu < 5000; mu = mu * 3 / 2 + 1) {
    const Schedule s = build_schedule(Config::from_mu(2, mu));
    ASSERT_GE(s.rounds, 1) << mu;
    EXPECT_LE(s.rounds, s.nominal_rounds);
    EXPECT_EQ(s.nominal_rounds, static_cast<int>(std::ceil(std::log(std::log2(double(mu))) / std::log(4.0 / 3))));
    for (int t = 1; t <= s.rounds; ++t) {
      EXPECT_LT(s.mu[t], s.mu[t - 1]);
      EXPECT_GT(s.tau[t], s.tau[t - 1]);
      EXPECT_EQ(s.tau[t] + s.mu[t], mu);
      // floor(x^(3/4)) by exact integer comparison.
      const auto x = static_cast<unsigned __int128>(s.mu[t - 1]);
      const auto r = static_cast<unsigned __int128>(s.mu[t]);
      EXPECT_LE(r * r * r * r, x * x * x);
      EXPECT_GT((r + 1) * (r + 1) * (r + 1) * (r + 1), x * x * x);
    }
    for (int t = 1; t < s.rounds; ++t) EXPECT_GT(s.mu[t], 2u);
  }
}

TEST(Diagnostics, Errors) {
  const Schedule s = build_schedule(Config::from_mu(2, 16));
  EXPECT_EQ(diagnostics_errors(LoadVector{{0, 0}, true}, s, 0), std::make_pair(std::uint64_t{0}, std::uint64_t{0}));
  EXPECT_EQ(diagnostics_errors(LoadVector{{8, 8}, true}, s, 1), std::make_pair(std::uint64_t{0}, std::uint64_t{0}));
  EXPECT_EQ(diagnostics_errors(LoadVector{{10, 7}, true}, s, 1), std::make_pair(std::uint64_t{1}, std::uint64_t{2}));
}

namespace {

// n = 2, mu = 16: bin 0 gets `in_bin0` listed balls, bin 1 is filled with
// plain balls so that no padding is needed.
hi2c::testing::ScriptedOracle two_bin_oracle(BallSet& set, std::uint64_t in_bin0) {
  hi2c::testing::ScriptedOracle o;
  for (BallId x = 100; set.size() + in_bin0 < 31; ++x) {
    o.set(x, 1, 1);
    set.push_back(x);
  }
  return o;
}

}  // namespace

TEST(SliceSpread, EvictsOnlyRoundBallsUpToSlack) {
  BallSet set;
  auto o = two_bin_oracle(set, 11);
  for (BallId x = 1; x <= 11; ++x) {
    o.set(x, 0, 1, x <= 2 ? BallType::three : BallType::one, x <= 2 ? std::optional<int>(1) : std::nullopt);
    set.push_back(x);
  }
  const auto r = allocate_slice_spread(set, Config(2, 32), o);
  // load 11 = tau_1 + 3 and two round-1 balls: both go.
  EXPECT_EQ(r.allocation.find(1)->bin, 1u);
  EXPECT_EQ(r.allocation.find(2)->bin, 1u);
  EXPECT_EQ(r.allocation.find(2)->choice, Choice::second);
  EXPECT_EQ(r.diagnostics.rounds[1].rethrown, 2u);
  EXPECT_EQ(r.second_hash_evaluated, (BallSet{1, 2}));
}

TEST(SliceSpread, NoEvictionBelowThreshold) {
  BallSet set;
  auto o = two_bin_oracle(set, 8);
  for (BallId x = 1; x <= 8; ++x) {
    o.set(x, 0, 1, BallType::three, 1);
    set.push_back(x);
  }
  const auto r = allocate_slice_spread(set, Config(2, 32), o);
  for (BallId x = 1; x <= 8; ++x) EXPECT_EQ(r.allocation.find(x)->choice, Choice::first);
}

TEST(SliceSpread, EvictsSmallestIdsFirst) {
  BallSet set;
  auto o = two_bin_oracle(set, 10);
  for (BallId x = 1; x <= 10; ++x) {
    const bool round1 = x == 3 || x == 5 || x == 9;
    o.set(x, 0, 1, round1 ? BallType::three : BallType::one, round1 ? std::optional<int>(1) : std::nullopt);
    set.push_back(x);
  }
  const auto r = allocate_slice_spread(set, Config(2, 32), o);
  EXPECT_EQ(r.allocation.find(3)->bin, 1u);
  EXPECT_EQ(r.allocation.find(5)->bin, 1u);
  EXPECT_EQ(r.allocation.find(9)->bin, 0u);
}

TEST(SliceSpread, NoRoundBallsMatchesSingleChoice) {
  hi2c::testing::ScriptedOracle o;
  BallSet set;
  for (BallId x = 0; x < 63; ++x) {
    o.set(x, static_cast<Bin>(x % 3), static_cast<Bin>((x + 1) % 4));
    set.push_back(x);
  }
  const Config cfg = Config::from_mu(4, 16);
  EXPECT_EQ(allocate_slice_spread(set, cfg, o).allocation, allocate_single_choice(set, cfg, o));
}

TEST(SliceSpread, GoodPreBakingContract) {
  const Oracle o(kSeed);
  const Config cfg = Config::from_mu(128, 64);
  harness::Rng rng(kSeed.derive("prebake", 0));
  const auto r = allocate_slice_spread(harness::random_set(rng, cfg.m), cfg, o);
  EXPECT_TRUE(allowable(r.allocation, o));
  BallSet second;
  for (const auto& p : r.allocation.entries) {
    if (p.choice == Choice::second) {
      EXPECT_EQ(o.ball_type(p.ball), BallType::three);
      second.push_back(p.ball);
    } else {
      EXPECT_EQ(p.bin, o.hash1(p.ball, cfg.n));
    }
  }
  EXPECT_EQ(second, r.second_hash_evaluated);
}

TEST(SliceSpread, AccountingIdentity) {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Oracle o(kSeed.derive("accounting", k));
    const Config cfg = Config::from_mu(64, k % 2 ? 64 : 16);
    harness::Rng rng(kSeed.derive("accounting-set", k));
    const auto r = allocate_slice_spread(harness::random_set(rng, cfg.m - k % 2), cfg, o);
    EXPECT_TRUE(r.diagnostics.accounting_holds());
    ASSERT_EQ(r.diagnostics.rounds.size(), static_cast<std::size_t>(r.schedule.rounds + 1));
    EXPECT_EQ(r.diagnostics.rounds[0].rethrown, cfg.m - k % 2);
    for (const auto& rec : r.diagnostics.rounds)
      EXPECT_EQ(rec.rethrown + rec.in_bins, r.diagnostics.ball_count);
  }
}

TEST(SliceSpread, RoundLoadsRecorded) {
  const Oracle o(kSeed);
  const Config cfg = Config::from_mu(32, 16);
  harness::Rng rng(kSeed.derive("round-loads", 0));
  const auto set = harness::random_set(rng, cfg.m);
  const auto r = allocate_slice_spread(set, cfg, o, {true});
  ASSERT_EQ(r.round_loads.size(), static_cast<std::size_t>(r.schedule.rounds + 1));
  EXPECT_EQ(r.round_loads.front(), loads(allocate_single_choice(set, cfg, o)).counts);
  EXPECT_EQ(r.round_loads.back(), loads(r.allocation).counts);
}

TEST(SliceSpread, DiagnosticsJson) {
  RoundDiagnostics d{5, 2, {{0, 0, 5, 0, 0, 0}}};
  EXPECT_EQ(diagnostics_to_json(d),
            "{\"ball_count\":5,\"n\":2,\"rounds\":[{\"round\":0,\"tau\":0,\"rethrown\":5,\"in_bins\":0,"
            "\"under_error\":0,\"over_error\":0}]}");
}
