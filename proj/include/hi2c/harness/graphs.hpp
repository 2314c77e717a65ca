#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "hi2c/harness/workload.hpp"
#include "hi2c/orient.hpp"

namespace hi2c::harness {

/// Connected random multigraph with 1..max_edges edges on at most
/// `max_vertices` of n bins. Self-loops and parallel edges are allowed.
inline CuckooGraph random_component(Rng& rng, std::uint64_t n, std::uint32_t max_edges, std::uint32_t max_vertices) {
  const auto edges = static_cast<std::uint32_t>(1 + rng.below(max_edges));
  const auto vcap = static_cast<std::uint32_t>(std::min<std::uint64_t>({max_vertices, edges + 1, n}));
  const auto vcount = static_cast<std::uint32_t>(1 + rng.below(vcap));
  std::vector<Bin> verts;
  while (verts.size() < vcount) {
    const auto w = static_cast<Bin>(rng.below(n));
    if (std::find(verts.begin(), verts.end(), w) == verts.end()) verts.push_back(w);
  }
  std::vector<Edge> out;
  BallId next = rng.below(1000);
  auto add = [&](Bin a, Bin b) {
    const bool flip = rng.below(2) == 1;
    out.push_back({next, flip ? b : a, flip ? a : b});
    next += 1 + rng.below(5);
  };
  // A spanning tree keeps it connected; remaining edges are arbitrary.
  for (std::uint32_t k = 1; k < vcount; ++k) add(verts[k], verts[rng.below(k)]);
  if (vcount == 1) add(verts[0], verts[0]);
  while (out.size() < std::max<std::size_t>(edges, vcount - 1))
    add(verts[rng.below(vcount)], verts[rng.below(vcount)]);
  // Ball order should not follow construction order.
  std::vector<BallId> ids;
  for (const auto& e : out) ids.push_back(e.ball);
  for (std::size_t k = ids.size(); k > 1; --k) std::swap(ids[k - 1], ids[rng.below(k)]);
  for (std::size_t k = 0; k < out.size(); ++k) out[k].ball = ids[k];
  return build_graph(std::move(out), n);
}

/// Random multigraph with `edges` edges on n vertices.
inline CuckooGraph random_graph(Rng& rng, std::uint64_t n, std::uint64_t edges) {
  std::vector<Edge> out;
  for (std::uint64_t k = 0; k < edges; ++k)
    out.push_back({k, static_cast<Bin>(rng.below(n)), static_cast<Bin>(rng.below(n))});
  return build_graph(std::move(out), n);
}

/// Balls present in both graphs whose bin differs between the orientations.
inline std::vector<BallId> changed_balls(const CuckooGraph& a, const Orientation& oa, const CuckooGraph& b,
                                         const Orientation& ob) {
  std::vector<BallId> out;
  std::size_t j = 0;
  for (std::size_t k = 0; k < a.edges.size(); ++k) {
    while (j < b.edges.size() && b.edges[j].ball < a.edges[k].ball) ++j;
    if (j < b.edges.size() && b.edges[j].ball == a.edges[k].ball &&
        target(a.edges[k], oa.side[k]) != target(b.edges[j], ob.side[j]))
      out.push_back(a.edges[k].ball);
  }
  return out;
}

}  // namespace hi2c::harness
