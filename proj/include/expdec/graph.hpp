#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "expdec/errors.hpp"

namespace expdec {

using Vertex = int;
using EdgeId = int;

/// Undirected multigraph. Parallel edges and self-loops are allowed.
///
/// Degree convention: a self-loop contributes exactly 1 to its endpoint's
/// degree. This is the unique choice under which replacing a cut edge {u,v}
/// by a self-loop at u preserves u's degree, which induced_with_loops relies
/// on. Consequently vol(V) = 2m - (#self-loops).
class MultiGraph {
public:
  MultiGraph() : n_(0), loops_(0) {}

  MultiGraph(int n, std::vector<std::pair<Vertex, Vertex>> edges)
      : n_(n), edges_(std::move(edges)), loops_(0) {
    require_input(n >= 0, "MultiGraph: negative vertex count");
    degree_.assign(n_, 0);
    for (auto &[u, v] : edges_) {
      require_input(0 <= u && u < n_ && 0 <= v && v < n_, "MultiGraph: edge endpoint out of range");
      if (u == v) {
        degree_[u] += 1;
        ++loops_;
      } else {
        degree_[u] += 1;
        degree_[v] += 1;
      }
    }
    // CSR adjacency; a self-loop appears once in its endpoint's list.
    off_.assign(n_ + 1, 0);
    for (auto &[u, v] : edges_) {
      off_[u + 1] += 1;
      if (u != v) off_[v + 1] += 1;
    }
    for (int i = 0; i < n_; ++i) off_[i + 1] += off_[i];
    adj_.resize(off_[n_]);
    std::vector<int> cursor(off_.begin(), off_.end() - 1);
    for (EdgeId e = 0; e < static_cast<EdgeId>(edges_.size()); ++e) {
      auto [u, v] = edges_[e];
      adj_[cursor[u]++] = {v, e};
      if (u != v) adj_[cursor[v]++] = {u, e};
    }
  }

  int n() const { return n_; }
  int m() const { return static_cast<int>(edges_.size()); }
  int self_loops() const { return loops_; }

  int degree(Vertex v) const { return degree_[v]; }
  const std::pair<Vertex, Vertex> &edge(EdgeId e) const { return edges_[e]; }
  const std::vector<std::pair<Vertex, Vertex>> &edges() const { return edges_; }
  bool is_loop(EdgeId e) const { return edges_[e].first == edges_[e].second; }

  /// Incidence list of v as (neighbor, edge id) pairs. A self-loop at v
  /// appears once, as (v, e).
  std::span<const std::pair<Vertex, EdgeId>> incident(Vertex v) const {
    return {adj_.data() + off_[v], adj_.data() + off_[v + 1]};
  }

  std::int64_t total_volume() const { return 2 * static_cast<std::int64_t>(m()) - loops_; }

  void check_vertex_set(std::span<const Vertex> s) const {
    for (Vertex v : s) require_input(0 <= v && v < n_, "vertex id out of range");
  }

private:
  int n_;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<int> degree_;
  std::vector<int> off_;
  std::vector<std::pair<Vertex, EdgeId>> adj_;
  int loops_;
};

/// A cut is just the member set of one side; the complement is implicit.
struct Cut {
  std::vector<Vertex> members;
};

inline std::vector<char> member_mask(const MultiGraph &g, std::span<const Vertex> s) {
  g.check_vertex_set(s);
  std::vector<char> mask(g.n(), 0);
  for (Vertex v : s) mask[v] = 1;
  return mask;
}

inline std::int64_t volume(const MultiGraph &g, std::span<const Vertex> s) {
  g.check_vertex_set(s);
  std::int64_t vol = 0;
  std::vector<char> seen(g.n(), 0);
  for (Vertex v : s) {
    if (seen[v]) continue;
    seen[v] = 1;
    vol += g.degree(v);
  }
  return vol;
}

/// Number of edges with exactly one endpoint in S. Self-loops never cross.
inline std::int64_t crossing_edges(const MultiGraph &g, const std::vector<char> &mask) {
  std::int64_t cross = 0;
  for (const auto &[u, v] : g.edges())
    if (mask[u] != mask[v]) ++cross;
  return cross;
}

inline std::int64_t crossing_edges(const MultiGraph &g, std::span<const Vertex> s) {
  return crossing_edges(g, member_mask(g, s));
}

namespace detail {
inline std::pair<std::int64_t, std::int64_t> cut_ratio(const MultiGraph &g,
                                                       std::span<const Vertex> s,
                                                       bool by_volume) {
  auto mask = member_mask(g, s);
  std::int64_t in_count = 0, in_vol = 0;
  for (Vertex v = 0; v < g.n(); ++v)
    if (mask[v]) {
      ++in_count;
      in_vol += g.degree(v);
    }
  require_input(in_count > 0 && in_count < g.n(), "cut side must be a nonempty proper subset");
  std::int64_t out_count = g.n() - in_count;
  std::int64_t out_vol = g.total_volume() - in_vol;
  std::int64_t denom = by_volume ? std::min(in_vol, out_vol) : std::min(in_count, out_count);
  require_input(denom > 0, "cut has zero denominator");
  return {crossing_edges(g, mask), denom};
}
} // namespace detail

/// Exact conductance as (crossing, min-volume) for tests that compare rationals.
inline std::pair<std::int64_t, std::int64_t> conductance_ratio(const MultiGraph &g,
                                                               std::span<const Vertex> s) {
  return detail::cut_ratio(g, s, /*by_volume=*/true);
}

inline double conductance(const MultiGraph &g, const Cut &c) {
  auto [num, den] = conductance_ratio(g, c.members);
  return static_cast<double>(num) / static_cast<double>(den);
}

inline std::pair<std::int64_t, std::int64_t> edge_expansion_ratio(const MultiGraph &g,
                                                                  std::span<const Vertex> s) {
  return detail::cut_ratio(g, s, /*by_volume=*/false);
}

inline double edge_expansion(const MultiGraph &g, const Cut &c) {
  auto [num, den] = edge_expansion_ratio(g, c.members);
  return static_cast<double>(num) / static_cast<double>(den);
}

/// G{A}: the subgraph induced by A, with one self-loop added at u for every
/// edge {u,v} that leaves A. Every vertex of A keeps its degree.
/// Vertices are renumbered 0..|A|-1 in increasing order of original id;
/// if to_parent is given, it receives that ordering.
inline MultiGraph induced_with_loops(const MultiGraph &g, std::span<const Vertex> a,
                                     std::vector<Vertex> *to_parent = nullptr) {
  auto mask = member_mask(g, a);
  std::vector<Vertex> order;
  for (Vertex v = 0; v < g.n(); ++v)
    if (mask[v]) order.push_back(v);
  std::vector<Vertex> local(g.n(), -1);
  for (int i = 0; i < static_cast<int>(order.size()); ++i) local[order[i]] = i;

  std::vector<std::pair<Vertex, Vertex>> edges;
  for (const auto &[u, v] : g.edges()) {
    if (mask[u] && mask[v]) {
      edges.emplace_back(local[u], local[v]);
    } else if (mask[u]) {
      edges.emplace_back(local[u], local[u]);
    } else if (mask[v]) {
      edges.emplace_back(local[v], local[v]);
    }
  }
  if (to_parent) *to_parent = order;
  return MultiGraph(static_cast<int>(order.size()), std::move(edges));
}

/// Plain induced subgraph G[A]: edges with both endpoints in A (self-loops
/// at members included). No degree compensation; use induced_with_loops for
/// that. Vertices renumbered 0..|A|-1 in increasing original id.
struct InducedSubgraph {
  MultiGraph g;
  std::vector<Vertex> to_parent;  // local vertex -> original vertex
  std::vector<EdgeId> edge_to_parent; // local edge -> original edge
};

inline InducedSubgraph induced_subgraph(const MultiGraph &g, const std::vector<char> &mask) {
  require_input(static_cast<int>(mask.size()) == g.n(), "induced_subgraph: mask size mismatch");
  InducedSubgraph out;
  std::vector<Vertex> local(g.n(), -1);
  for (Vertex v = 0; v < g.n(); ++v)
    if (mask[v]) {
      local[v] = static_cast<int>(out.to_parent.size());
      out.to_parent.push_back(v);
    }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (EdgeId e = 0; e < g.m(); ++e) {
    auto [u, v] = g.edge(e);
    if (mask[u] && mask[v]) {
      edges.emplace_back(local[u], local[v]);
      out.edge_to_parent.push_back(e);
    }
  }
  out.g = MultiGraph(static_cast<int>(out.to_parent.size()), std::move(edges));
  return out;
}

/// Connected components (self-loops connect nothing). Returns one vertex
/// list per component, each sorted ascending.
inline std::vector<std::vector<Vertex>> connected_components(const MultiGraph &g) {
  std::vector<int> comp(g.n(), -1);
  std::vector<std::vector<Vertex>> out;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < g.n(); ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(out.size());
    out.emplace_back();
    comp[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      out[id].push_back(v);
      for (auto [u, e] : g.incident(v)) {
        (void)e;
        if (comp[u] < 0) {
          comp[u] = id;
          stack.push_back(u);
        }
      }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

inline bool is_connected(const MultiGraph &g) {
  return g.n() <= 1 || connected_components(g).size() == 1;
}

} // namespace expdec
