#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hi2c/allocators.hpp"
#include "hi2c/model.hpp"
#include "hi2c/oracle.hpp"

namespace hi2c::harness {

/// Workload randomness, kept apart from the hash streams.
class Rng {
 public:
  explicit Rng(const MasterSeed& seed) : engine_(detail::get_le64(seed.key().data())) {}

  std::uint64_t next() { return engine_(); }
  std::uint64_t below(std::uint64_t bound) { return detail::reduce(engine_(), bound); }

 private:
  std::mt19937_64 engine_;
};

enum class ChurnMode { uniform, reinsertion, sliding };

inline std::string_view name_of(ChurnMode c) {
  switch (c) {
    case ChurnMode::uniform: return "uniform-churn";
    case ChurnMode::reinsertion: return "reinsertion-heavy";
    case ChurnMode::sliding: return "sliding-window";
  }
  return "?";
}

inline ChurnMode parse_churn(std::string_view s) {
  for (auto c : {ChurnMode::uniform, ChurnMode::reinsertion, ChurnMode::sliding})
    if (name_of(c) == s) return c;
  throw ConfigError("unknown churn mode: " + std::string(s));
}

struct WorkloadSpec {
  std::uint64_t n = 256;
  std::uint64_t m = 256 * 16;
  AllocatorKind allocator = AllocatorKind::hi_greedy;
  std::uint64_t ops = 1000;
  ChurnMode churn = ChurnMode::uniform;
  std::string seed_hex = std::string(kDefaultSeedHex);
  std::uint64_t trials = 1;
  std::uint64_t snapshot_every = 16;
  std::uint64_t pool = 4;  // recycled ids for reinsertion-heavy

  Config config() const { return Config(n, m); }
  MasterSeed seed() const { return MasterSeed::from_hex(seed_hex); }
  void validate() const {
    config();
    if (ops < 1) throw ConfigError("ops must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (snapshot_every < 1) throw ConfigError("snapshot interval must be >= 1");
    if (churn == ChurnMode::reinsertion && (pool < 1 || pool > m)) throw ConfigError("pool must be in [1, m]");
  }
};

struct Op {
  bool insert = false;
  BallId ball = 0;
  friend bool operator==(const Op&, const Op&) = default;
};

struct Trace {
  Config cfg;
  BallSet initial;
  std::vector<Op> ops;
};

/// Independent per-trial streams: hashes and workload draws.
inline Oracle trial_oracle(const MasterSeed& seed, std::uint64_t trial) { return Oracle(seed.derive("trial", trial)); }
inline Rng trial_rng(const MasterSeed& seed, std::uint64_t trial) { return Rng(seed.derive("workload", trial)); }

/// Starts from the full set {0, ..., m-1} and alternates delete, insert, so
/// the size stays in {m-1, m}. Fresh ids continue upward from m.
inline Trace generate_trace(const WorkloadSpec& spec, std::uint64_t trial = 0) {
  spec.validate();
  Trace t{spec.config(), {}, {}};
  Rng rng = trial_rng(spec.seed(), trial);
  t.initial.resize(spec.m);
  for (std::uint64_t k = 0; k < spec.m; ++k) t.initial[k] = k;

  std::vector<BallId> present = t.initial;  // unordered pool for O(1) random deletes
  BallId next_fresh = spec.m;
  BallId oldest = 0;
  BallId last_deleted = 0;

  auto remove_at = [&](std::size_t pos) {
    const BallId x = present[pos];
    present[pos] = present.back();
    present.pop_back();
    return x;
  };

  for (std::uint64_t k = 0; k < spec.ops; ++k) {
    const bool insert = (k % 2) == 1;
    Op op{insert, 0};
    switch (spec.churn) {
      case ChurnMode::uniform:
        if (insert) op.ball = next_fresh++;
        else op.ball = remove_at(rng.below(present.size()));
        if (insert) present.push_back(op.ball);
        break;
      case ChurnMode::reinsertion:
        // Ids 0..pool-1 never leave the recycled pool; exactly one is absent after a delete.
        if (insert) op.ball = last_deleted;
        else op.ball = last_deleted = rng.below(spec.pool);
        break;
      case ChurnMode::sliding:
        op.ball = insert ? next_fresh++ : oldest++;
        break;
    }
    t.ops.push_back(op);
  }
  return t;
}

/// `size` distinct random real ids, sorted.
inline BallSet random_set(Rng& rng, std::uint64_t size) {
  BallSet s;
  s.reserve(size);
  while (s.size() < size) {
    while (s.size() < size) s.push_back(rng.next() & kMaxRealBall);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return s;
}

/// Applies an op to a sorted set.
inline void apply(BallSet& s, const Op& op) {
  const auto it = std::lower_bound(s.begin(), s.end(), op.ball);
  const bool found = it != s.end() && *it == op.ball;
  if (op.insert) {
    if (found) throw std::invalid_argument("insert of a present ball");
    s.insert(it, op.ball);
  } else {
    if (!found) throw std::invalid_argument("delete of an absent ball");
    s.erase(it);
  }
}

}  // namespace hi2c::harness
