#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "hi2c/allocators.hpp"
#include "hi2c/harness/workload.hpp"

namespace hi2c::harness {

/// A dynamic table whose storage keeps insertion order, so its memory
/// layout depends on history. The allocation it reports must not.
template <BallOracle O>
class Table {
 public:
  Table(AllocatorKind kind, const Config& cfg, const O& oracle) : kind_(kind), cfg_(cfg), oracle_(&oracle) {}

  void insert(BallId x) {
    if (std::find(balls_.begin(), balls_.end(), x) != balls_.end()) throw std::invalid_argument("ball already present");
    if (balls_.size() >= cfg_.m) throw CapacityError("table is full");
    balls_.push_back(x);
  }

  void erase(BallId x) {
    const auto it = std::find(balls_.begin(), balls_.end(), x);
    if (it == balls_.end()) throw std::invalid_argument("ball not present");
    balls_.erase(it);
  }

  void apply(const Op& op) { op.insert ? insert(op.ball) : erase(op.ball); }

  const std::vector<BallId>& storage() const { return balls_; }
  Allocation allocation() const { return allocate(kind_, balls_, cfg_, *oracle_); }
  std::string serialize() const { return to_text(allocation()); }

 private:
  AllocatorKind kind_;
  Config cfg_;
  const O* oracle_;
  std::vector<BallId> balls_;
};

/// A random history ending at `target`: its balls inserted in shuffled
/// order, interleaved with insert-delete detours through foreign ids.
inline std::vector<Op> random_history(const BallSet& target, const Config& cfg, Rng& rng,
                                      std::uint64_t detours) {
  std::vector<BallId> order = target;
  for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
  std::vector<Op> ops;
  std::vector<BallId> foreign;
  std::uint64_t size = 0;
  auto fresh = [&] {
    for (;;) {
      const BallId x = rng.next() & kMaxRealBall;
      if (!std::binary_search(target.begin(), target.end(), x) &&
          std::find(foreign.begin(), foreign.end(), x) == foreign.end())
        return x;
    }
  };
  for (BallId x : order) {
    if (detours > 0 && size < cfg.m && rng.below(order.size()) < detours) {
      // A foreign ball comes and goes, sometimes later rather than at once.
      const BallId y = fresh();
      foreign.push_back(y);
      ops.push_back({true, y});
      ++size;
    }
    if (!foreign.empty() && (size >= cfg.m || rng.below(2) == 0)) {
      const auto pos = rng.below(foreign.size());
      ops.push_back({false, foreign[pos]});
      foreign.erase(foreign.begin() + static_cast<std::ptrdiff_t>(pos));
      --size;
    }
    ops.push_back({true, x});
    ++size;
  }
  for (BallId y : foreign) ops.push_back({false, y});
  return ops;
}

}  // namespace hi2c::harness
