#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hi2c/core.hpp"
#include "hi2c/oracle.hpp"

namespace hi2c {

/// A ball as an edge of the cuckoo graph: u is its first endpoint, v its second.
struct Edge {
  BallId ball = 0;
  Bin u = 0;
  Bin v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Multigraph on n bins; edges sorted by ball id. Self-loops and parallel
/// edges are kept.
struct CuckooGraph {
  std::uint64_t n = 0;
  std::vector<Edge> edges;
};

enum class Side : std::uint8_t { u, v };

inline Bin target(const Edge& e, Side s) { return s == Side::u ? e.u : e.v; }

/// Direction per edge, aligned with CuckooGraph::edges.
struct Orientation {
  std::vector<Side> side;
  friend bool operator==(const Orientation&, const Orientation&) = default;
};

inline CuckooGraph build_graph(std::vector<Edge> edges, std::uint64_t n) {
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.ball < b.ball; });
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].u >= n || edges[k].v >= n) throw std::out_of_range("edge endpoint outside [0, n)");
    if (k && edges[k].ball == edges[k - 1].ball) throw std::invalid_argument("duplicate ball in graph");
  }
  return CuckooGraph{n, std::move(edges)};
}

/// Graph over `balls` with endpoints from `resolve(ball) -> std::pair<Bin, Bin>`.
template <class Resolver>
CuckooGraph build_graph(std::span<const BallId> balls, std::uint64_t n, Resolver&& resolve) {
  std::vector<Edge> edges;
  edges.reserve(balls.size());
  for (BallId x : balls) {
    const auto [u, v] = resolve(x);
    edges.push_back({x, static_cast<Bin>(u), static_cast<Bin>(v)});
  }
  return build_graph(std::move(edges), n);
}

struct Component {
  std::vector<std::uint32_t> edges;  // indices into the graph, ascending
  std::vector<Bin> vertices;         // ascending

  /// e - v + 1; every self-loop and every extra parallel edge adds one.
  std::uint64_t cycles() const { return edges.size() + 1 - vertices.size(); }
};

/// Connected components that carry at least one edge, ordered by smallest vertex.
inline std::vector<Component> components(const CuckooGraph& g) {
  std::vector<std::uint32_t> parent(g.n);
  for (std::uint32_t i = 0; i < g.n; ++i) parent[i] = i;
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<Bin> touched;
  touched.reserve(2 * g.edges.size());
  for (const auto& e : g.edges) {
    touched.push_back(e.u);
    touched.push_back(e.v);
    const auto a = find(e.u);
    const auto b = find(e.v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  // Roots are the smallest vertex of each component, so iterating touched
  // vertices in order creates components in order of their smallest vertex.
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> slot(g.n, kNone);
  std::vector<Component> out;
  for (Bin w : touched) {
    const auto root = find(w);
    if (slot[root] == kNone) {
      slot[root] = static_cast<std::uint32_t>(out.size());
      out.emplace_back();
    }
    out[slot[root]].vertices.push_back(w);
  }
  for (std::uint32_t k = 0; k < g.edges.size(); ++k) out[slot[find(g.edges[k].u)]].edges.push_back(k);
  return out;
}

inline std::vector<std::uint64_t> in_degrees(const CuckooGraph& g, const Orientation& o) {
  std::vector<std::uint64_t> deg(g.n, 0);
  for (std::size_t k = 0; k < g.edges.size(); ++k) ++deg[target(g.edges[k], o.side[k])];
  return deg;
}

namespace detail {

// Max-flow (Dinic) on source -> edge -> endpoint -> sink with sink
// capacity d per vertex. Node and arc order follow the canonical edge and
// vertex order, so the resulting orientation depends only on the input.
class OrientationFlow {
 public:
  OrientationFlow(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::uint32_t vertex_count)
      : edge_count_(static_cast<int>(a.size())), vertex_count_(static_cast<int>(vertex_count)) {
    const int nodes = edge_count_ + vertex_count_ + 2;
    source_ = 0;
    sink_ = nodes - 1;
    adj_.assign(nodes, {});
    endpoint_arc_.resize(edge_count_ * 2, -1);
    for (int e = 0; e < edge_count_; ++e) add_arc(source_, edge_node(e), 1);
    for (int e = 0; e < edge_count_; ++e) {
      endpoint_arc_[2 * e] = add_arc(edge_node(e), vertex_node(a[e]), 1);
      if (a[e] != b[e]) endpoint_arc_[2 * e + 1] = add_arc(edge_node(e), vertex_node(b[e]), 1);
    }
    sink_arc_.resize(vertex_count_);
    for (int w = 0; w < vertex_count_; ++w) sink_arc_[w] = add_arc(vertex_node(w), sink_, 0);
  }

  void set_bound(int d) {
    for (int w = 0; w < vertex_count_; ++w) {
      Arc& arc = arcs_[sink_arc_[w]];
      const int used = arcs_[arc.rev].cap;  // flow on the arc
      arc.cap = d - used;
    }
  }

  // Greedy start: each edge to the first endpoint with spare room.
  void seed(int d) {
    std::vector<int> load(vertex_count_, 0);
    for (int e = 0; e < edge_count_; ++e) {
      for (int s = 0; s < 2; ++s) {
        const int arc_id = endpoint_arc_[2 * e + s];
        if (arc_id < 0) continue;
        const int w = arcs_[arc_id].to - (edge_count_ + 1);
        if (load[w] >= d) continue;
        ++load[w];
        push(adj_[source_][e], 1);
        push(arc_id, 1);
        push(sink_arc_[w], 1);
        ++flow_;
        break;
      }
    }
  }

  int max_flow() {
    while (bfs()) {
      it_.assign(adj_.size(), 0);
      while (augment()) ++flow_;
    }
    return flow_;
  }

  int flow() const { return flow_; }

  // 0 if edge e flows to its first endpoint, 1 if to its second.
  int chosen(int e) const {
    const int first = endpoint_arc_[2 * e];
    return arcs_[first].cap == 0 ? 0 : 1;
  }

 private:
  struct Arc {
    int to;
    int rev;
    int cap;
  };

  int edge_node(int e) const { return 1 + e; }
  int vertex_node(std::uint32_t w) const { return 1 + edge_count_ + static_cast<int>(w); }

  int add_arc(int from, int to, int cap) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, id + 1, cap});
    arcs_.push_back({from, id, 0});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  void push(int arc_id, int amount) {
    arcs_[arc_id].cap -= amount;
    arcs_[arcs_[arc_id].rev].cap += amount;
  }

  bool bfs() {
    level_.assign(adj_.size(), -1);
    std::queue<int> q;
    level_[source_] = 0;
    q.push(source_);
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      for (int id : adj_[x]) {
        const Arc& arc = arcs_[id];
        if (arc.cap > 0 && level_[arc.to] < 0) {
          level_[arc.to] = level_[x] + 1;
          q.push(arc.to);
        }
      }
    }
    return level_[sink_] >= 0;
  }

  // One unit along a level-increasing path, iterative DFS with current-arc pointers.
  bool augment() {
    path_.clear();
    int x = source_;
    while (x != sink_) {
      bool advanced = false;
      auto& ptr = it_[x];
      while (ptr < adj_[x].size()) {
        const int id = adj_[x][ptr];
        const Arc& arc = arcs_[id];
        if (arc.cap > 0 && level_[arc.to] == level_[x] + 1) {
          path_.push_back(id);
          x = arc.to;
          advanced = true;
          break;
        }
        ++ptr;
      }
      if (!advanced) {
        if (x == source_) return false;
        level_[x] = -1;  // dead end
        const int back = path_.back();
        path_.pop_back();
        x = arcs_[arcs_[back].rev].to;
        ++it_[x];
      }
    }
    for (int id : path_) push(id, 1);
    return true;
  }

  int edge_count_;
  int vertex_count_;
  int source_ = 0;
  int sink_ = 0;
  int flow_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> endpoint_arc_;
  std::vector<int> sink_arc_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
  std::vector<int> path_;
};

}  // namespace detail

/// Minimum max-in-degree orientation of one connected component, returned in
/// the component's edge order. The bound d starts at ceil(e/v) and rises
/// until a flow saturates every edge; the flow is kept across bounds. A
/// self-loop points at its own vertex and counts toward its in-degree.
inline std::vector<Side> orient_component(const CuckooGraph& g, const Component& c) {
  const auto vcount = static_cast<std::uint32_t>(c.vertices.size());
  auto local = [&](Bin w) {
    return static_cast<std::uint32_t>(std::lower_bound(c.vertices.begin(), c.vertices.end(), w) - c.vertices.begin());
  };
  std::vector<std::uint32_t> a(c.edges.size()), b(c.edges.size());
  for (std::size_t k = 0; k < c.edges.size(); ++k) {
    const Edge& e = g.edges[c.edges[k]];
    a[k] = local(e.u);
    b[k] = local(e.v);
  }
  const int ecount = static_cast<int>(c.edges.size());
  int d = std::max(1, static_cast<int>((c.edges.size() + vcount - 1) / vcount));
  detail::OrientationFlow flow(a, b, vcount);
  flow.set_bound(d);
  flow.seed(d);
  while (flow.max_flow() < ecount) {
    ++d;
    flow.set_bound(d);
  }
  std::vector<Side> sides(c.edges.size());
  for (int k = 0; k < ecount; ++k) sides[k] = flow.chosen(k) == 0 ? Side::u : Side::v;
  return sides;
}

/// Each component oriented independently.
inline Orientation canonical_orientation(const CuckooGraph& g) {
  Orientation o{std::vector<Side>(g.edges.size(), Side::u)};
  for (const auto& c : components(g)) {
    const auto sides = orient_component(g, c);
    for (std::size_t k = 0; k < c.edges.size(); ++k) o.side[c.edges[k]] = sides[k];
  }
  return o;
}

/// Splits the edges into `parts` subgraphs by the ECO label of their ball.
template <BallOracle O>
std::vector<CuckooGraph> eco_partition(const CuckooGraph& g, std::uint32_t parts, const O& oracle,
                                       std::vector<std::vector<std::uint32_t>>* origin = nullptr) {
  if (parts == 0) throw ConfigError("ECO part count must be >= 1");
  std::vector<CuckooGraph> sub(parts, CuckooGraph{g.n, {}});
  if (origin) origin->assign(parts, {});
  for (std::uint32_t k = 0; k < g.edges.size(); ++k) {
    const auto j = oracle.eco_label(g.edges[k].ball, parts);
    sub[j].edges.push_back(g.edges[k]);
    if (origin) (*origin)[j].push_back(k);
  }
  return sub;
}

/// Union of the canonical orientations of the ECO subgraphs.
template <BallOracle O>
Orientation eco_orient(const CuckooGraph& g, std::uint32_t parts, const O& oracle) {
  std::vector<std::vector<std::uint32_t>> origin;
  const auto sub = eco_partition(g, parts, oracle, &origin);
  Orientation o{std::vector<Side>(g.edges.size(), Side::u)};
  for (std::uint32_t j = 0; j < parts; ++j) {
    const auto part = canonical_orientation(sub[j]);
    for (std::size_t k = 0; k < origin[j].size(); ++k) o.side[origin[j][k]] = part.side[k];
  }
  return o;
}

/// Exhaustive minimum of the max in-degree over all orientations.
inline std::uint64_t brute_min_max_indegree(std::span<const Edge> edges, std::uint64_t n) {
  if (edges.size() > 16) throw std::invalid_argument("too many edges for exhaustive search");
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> deg(n);
  const std::uint32_t combos = 1u << edges.size();
  for (std::uint32_t mask = 0; mask < combos; ++mask) {
    std::fill(deg.begin(), deg.end(), 0);
    std::uint64_t worst = 0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Bin w = (mask >> k) & 1u ? edges[k].v : edges[k].u;
      worst = std::max(worst, ++deg[w]);
    }
    best = std::min(best, worst);
  }
  return edges.empty() ? 0 : best;
}

struct ComponentStats {
  std::uint64_t component_count = 0;
  std::uint64_t max_cycles = 0;
  std::uint64_t max_edges = 0;
  double mean_edges = 0.0;
};

inline ComponentStats component_stats(const CuckooGraph& g) {
  ComponentStats s;
  std::uint64_t total = 0;
  for (const auto& c : components(g)) {
    ++s.component_count;
    s.max_cycles = std::max(s.max_cycles, c.cycles());
    s.max_edges = std::max<std::uint64_t>(s.max_edges, c.edges.size());
    total += c.edges.size();
  }
  s.mean_edges = s.component_count ? static_cast<double>(total) / static_cast<double>(s.component_count) : 0.0;
  return s;
}

/// "ball u v side" per edge, side being the letter u or v.
inline std::string graph_dump(const CuckooGraph& g, const Orientation& o) {
  std::string out;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    out += std::to_string(e.ball) + ' ' + std::to_string(e.u) + ' ' + std::to_string(e.v) + ' ' +
           (o.side[k] == Side::u ? 'u' : 'v') + '\n';
  }
  return out;
}

}  // namespace hi2c
