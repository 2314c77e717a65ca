#pragma once

#include <span>
#include <string>
#include <string_view>

#include "hi2c/greedy.hpp"
#include "hi2c/model.hpp"
#include "hi2c/post_process.hpp"
#include "hi2c/slice_spread.hpp"

namespace hi2c {

enum class AllocatorKind { single, hi_greedy, slice_spread, full };

inline constexpr AllocatorKind kAllAllocators[] = {AllocatorKind::single, AllocatorKind::hi_greedy,
                                                   AllocatorKind::slice_spread, AllocatorKind::full};

inline std::string_view name_of(AllocatorKind k) {
  switch (k) {
    case AllocatorKind::single: return "single";
    case AllocatorKind::hi_greedy: return "hi-greedy";
    case AllocatorKind::slice_spread: return "slice-spread";
    case AllocatorKind::full: return "full";
  }
  return "?";
}

inline AllocatorKind parse_allocator(std::string_view s) {
  for (auto k : kAllAllocators)
    if (name_of(k) == s) return k;
  throw ConfigError("unknown allocator: " + std::string(s));
}

template <BallOracle O>
Allocation allocate(AllocatorKind kind, std::span<const BallId> balls, const Config& cfg, const O& oracle) {
  switch (kind) {
    case AllocatorKind::single: return allocate_single_choice(balls, cfg, oracle);
    case AllocatorKind::hi_greedy: return allocate_hi_greedy(balls, cfg, oracle, false).allocation;
    case AllocatorKind::slice_spread: return allocate_slice_spread(balls, cfg, oracle).allocation;
    case AllocatorKind::full: return full_allocate(balls, cfg, oracle).allocation;
  }
  throw ConfigError("unknown allocator");
}

}  // namespace hi2c
