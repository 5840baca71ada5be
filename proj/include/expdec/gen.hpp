#pragma once

#include <algorithm>
#include <vector>

#include "expdec/errors.hpp"
#include "expdec/graph.hpp"
#include "expdec/prng.hpp"

namespace expdec {

/// Random d-regular multigraph by the configuration model: n*d stubs are
/// shuffled and paired. Multi-edges are retained; pairings with self-loops
/// are reshuffled so the degree sums come out exactly d*n under the
/// loop-counts-once convention.
inline MultiGraph random_regular(int n, int deg, Rng &rng) {
  require_input(n >= 2 && deg >= 1, "random_regular: need n >= 2, deg >= 1");
  require_input((static_cast<long long>(n) * deg) % 2 == 0, "random_regular: n*deg must be even");
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * deg);
  for (;;) {
    stubs.clear();
    for (int v = 0; v < n; ++v)
      for (int i = 0; i < deg; ++i) stubs.push_back(v);
    rng.shuffle(stubs);
    bool has_loop = false;
    for (std::size_t i = 0; i < stubs.size(); i += 2)
      if (stubs[i] == stubs[i + 1]) {
        has_loop = true;
        break;
      }
    if (has_loop) continue;
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(stubs.size() / 2);
    for (std::size_t i = 0; i < stubs.size(); i += 2) edges.emplace_back(stubs[i], stubs[i + 1]);
    return MultiGraph(n, std::move(edges));
  }
}

/// k complete graphs of n_each vertices, consecutive parts joined by
/// `bridges` edges. Deterministic layout: part p holds vertices
/// [p*n_each, (p+1)*n_each); bridge j between parts p, p+1 joins vertex j of
/// each (mod n_each).
inline MultiGraph dumbbell(int parts, int n_each, int bridges) {
  require_input(parts >= 1 && n_each >= 2 && bridges >= 0, "dumbbell: bad shape");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (int p = 0; p < parts; ++p) {
    const int base = p * n_each;
    for (int i = 0; i < n_each; ++i)
      for (int j = i + 1; j < n_each; ++j) edges.emplace_back(base + i, base + j);
  }
  for (int p = 0; p + 1 < parts; ++p)
    for (int j = 0; j < bridges; ++j)
      edges.emplace_back(p * n_each + (j % n_each), (p + 1) * n_each + (j % n_each));
  return MultiGraph(parts * n_each, std::move(edges));
}

/// k random deg-regular parts joined cyclically (p to p+1) by `bridges`
/// random cross edges each.
inline MultiGraph planted_expanders(int parts, int n_each, int deg, int bridges, Rng &rng) {
  require_input(parts >= 2, "planted_expanders: need at least two parts");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (int p = 0; p < parts; ++p) {
    MultiGraph part = random_regular(n_each, deg, rng);
    const int base = p * n_each;
    for (const auto &[u, v] : part.edges()) edges.emplace_back(base + u, base + v);
  }
  for (int p = 0; p + 1 < parts; ++p)
    for (int j = 0; j < bridges; ++j)
      edges.emplace_back(p * n_each + rng.below_int(n_each),
                         (p + 1) * n_each + rng.below_int(n_each));
  return MultiGraph(parts * n_each, std::move(edges));
}

/// Connected random multigraph: a random spanning tree plus extra random
/// edges (may create parallels, never self-loops).
inline MultiGraph random_connected(int n, int extra_edges, Rng &rng) {
  require_input(n >= 1 && extra_edges >= 0, "random_connected: bad shape");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 1; v < n; ++v) edges.emplace_back(v, rng.below_int(v));
  for (int i = 0; i < extra_edges && n >= 2; ++i) {
    Vertex u = rng.below_int(n);
    Vertex v = rng.below_int(n - 1);
    if (v >= u) ++v;
    edges.emplace_back(u, v);
  }
  return MultiGraph(n, std::move(edges));
}

} // namespace expdec
