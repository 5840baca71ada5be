#pragma once

#include <vector>

#include "expdec/graph.hpp"

namespace expdec {

/// The subdivision graph G_E: every edge e of G, including self-loops, is
/// replaced by a split node x_e of degree 2. Regular nodes keep their ids
/// 0..n-1; the split node of edge e is n+e. |V'| = n+m and |E'| = 2m.
struct SubdivisionGraph {
  MultiGraph base;
  MultiGraph ge;

  int n_regular() const { return base.n(); }
  int n_split() const { return base.m(); }

  bool is_split(Vertex v) const { return v >= base.n(); }
  EdgeId edge_of(Vertex split_node) const { return split_node - base.n(); }
  Vertex split_of(EdgeId e) const { return base.n() + e; }
};

inline SubdivisionGraph subdivide(const MultiGraph &g) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(2 * g.m());
  for (EdgeId e = 0; e < g.m(); ++e) {
    auto [u, v] = g.edge(e);
    Vertex x = g.n() + e;
    edges.emplace_back(u, x);
    edges.emplace_back(v, x); // a self-loop {u,u} yields two parallel {u,x}
  }
  return SubdivisionGraph{g, MultiGraph(g.n() + g.m(), std::move(edges))};
}

/// A cut S of G_E respects the subdivision when every split node whose two
/// regular neighbors are both in S is itself in S, and symmetrically for the
/// complement.
inline bool respects_subdivision(const SubdivisionGraph &sg, const std::vector<char> &in_s) {
  require_input(static_cast<int>(in_s.size()) == sg.ge.n(),
                "respects_subdivision: mask size mismatch");
  for (EdgeId e = 0; e < sg.base.m(); ++e) {
    auto [u, v] = sg.base.edge(e);
    Vertex x = sg.split_of(e);
    if (in_s[u] && in_s[v] && !in_s[x]) return false;
    if (!in_s[u] && !in_s[v] && in_s[x]) return false;
  }
  return true;
}

inline bool respects_subdivision(const SubdivisionGraph &sg, std::span<const Vertex> s) {
  return respects_subdivision(sg, member_mask(sg.ge, s));
}

} // namespace expdec
