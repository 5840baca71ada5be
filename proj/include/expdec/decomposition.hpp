#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "expdec/cut_matching.hpp"
#include "expdec/errors.hpp"
#include "expdec/graph.hpp"
#include "expdec/oracles.hpp"
#include "expdec/params.hpp"
#include "expdec/prng.hpp"
#include "expdec/trimming.hpp"

namespace expdec {

struct ClusterInfo {
  std::vector<Vertex> vertices;  // original ids
  long long vol = 0;             // volume in the original graph
  std::string cert_method;       // brute | eigenvalue | game-certified
  double cert_value = 0.0;
};

struct Partition {
  std::vector<std::vector<Vertex>> clusters;
  long long inter_cluster_edges = 0;
  std::vector<ClusterInfo> info;
  long long rounds_total = 0;
  std::uint64_t seed = 0;
  double phi = 0.0;
  Mode mode = Mode::desk;
  int trim_fallbacks = 0; // unbalanced outcomes whose trim precondition failed
};

struct DecompOptions {
  int brute_cap = 16;   // exact certification up to this many vertices
  int eigen_cap = 400;  // dense eigenvalue certification up to this
  GameOptions game;
};

namespace detail {

struct WorkItem {
  MultiGraph graph;            // degree-preserving view (G{A} chain)
  std::vector<Vertex> orig;    // local -> original vertex id
  int depth = 0;
  std::uint64_t seed = 0;
};

inline ClusterInfo certify_cluster(const MultiGraph &g_orig, const std::vector<Vertex> &vertices,
                                   double phi, const DecompOptions &opts) {
  ClusterInfo info;
  info.vertices = vertices;
  info.vol = volume(g_orig, vertices);
  MultiGraph cluster = induced_with_loops(g_orig, vertices);
  if (cluster.n() <= 1) {
    info.cert_method = "brute";
    info.cert_value = 1.0;
  } else if (cluster.n() <= opts.brute_cap) {
    info.cert_method = "brute";
    info.cert_value = brute_force_min_conductance(cluster, opts.brute_cap).value;
  } else if (cluster.n() <= opts.eigen_cap) {
    info.cert_method = "eigenvalue";
    info.cert_value = normalized_laplacian_lambda2(cluster, opts.eigen_cap) / 2.0;
  } else {
    info.cert_method = "game-certified";
    info.cert_value = phi;
  }
  return info;
}

} // namespace detail

/// Recursive decomposition: run the cut-matching game; certified components
/// become clusters, balanced cuts recurse on both sides, unbalanced cuts are
/// trimmed and the remainder recursed. Every recursion works on G{A}, so
/// degrees stay those of the original graph. Work-list based; each work item
/// is seeded from (parent seed, component index) and disconnected inputs are
/// split by component first.
inline Partition decomp(const MultiGraph &g, double phi, Mode mode, std::uint64_t seed,
                        const DecompOptions &opts = {}) {
  Partition part;
  part.seed = seed;
  part.phi = phi;
  part.mode = mode;

  const int depth_guard =
      4 * static_cast<int>(std::ceil(std::pow(Params::log2_clamped(std::max(g.m(), 2)), 2))) + 32;

  std::vector<Vertex> all(g.n());
  for (Vertex v = 0; v < g.n(); ++v) all[v] = v;

  std::deque<detail::WorkItem> work;
  work.push_back({g, all, 0, seed});

  while (!work.empty()) {
    detail::WorkItem item = std::move(work.front());
    work.pop_front();
    require_internal(item.depth <= depth_guard, "decomp: recursion depth guard exceeded");

    auto components = connected_components(item.graph);
    for (std::size_t ci = 0; ci < components.size(); ++ci) {
      const auto &comp = components[ci];
      std::vector<Vertex> comp_orig;
      comp_orig.reserve(comp.size());
      for (Vertex v : comp) comp_orig.push_back(item.orig[v]);

      if (comp.size() == 1) {
        part.info.push_back(detail::certify_cluster(g, comp_orig, phi, opts));
        continue;
      }

      MultiGraph comp_graph =
          components.size() == 1 ? item.graph : induced_with_loops(item.graph, comp);
      const std::uint64_t comp_seed = mix_seed(item.seed, static_cast<std::uint64_t>(ci));

      Params params = mode == Mode::desk ? Params::desk(phi, comp_graph.m(), comp_seed)
                                         : Params::paper(phi, comp_graph.m(), comp_seed);
      CutMatchingResult res = cut_matching(comp_graph, params, opts.game);
      part.rounds_total += res.rounds;

      auto push_child = [&](const std::vector<Vertex> &local_side, std::uint64_t salt) {
        std::vector<Vertex> side_orig;
        side_orig.reserve(local_side.size());
        for (Vertex v : local_side) side_orig.push_back(comp_orig[v]);
        MultiGraph child = induced_with_loops(comp_graph, local_side);
        require_internal(child.n() < comp_graph.n(), "decomp: child did not shrink");
        work.push_back({std::move(child), std::move(side_orig), item.depth + 1,
                        mix_seed(comp_seed, salt)});
      };

      if (res.outcome == GameCase::certified) {
        // Components too small for the selection minimum end here with a
        // diagnostic; at that size exhaustive search is exact, so certify or
        // split along the brute-force witness instead of trusting the flag.
        if (res.rst_too_small && comp_graph.n() >= 2 && comp_graph.n() <= 20) {
          auto brute = brute_force_min_conductance(comp_graph);
          if (brute.value + 1e-12 < phi) {
            std::vector<char> in_witness(comp_graph.n(), 0);
            for (Vertex v : brute.witness) in_witness[v] = 1;
            std::vector<Vertex> rest;
            for (Vertex v = 0; v < comp_graph.n(); ++v)
              if (!in_witness[v]) rest.push_back(v);
            push_child(brute.witness, 1);
            push_child(rest, 2);
            continue;
          }
        }
        part.info.push_back(detail::certify_cluster(g, comp_orig, phi, opts));
        continue;
      }

      require_internal(!res.a_side.empty() && !res.r_side.empty(),
                       "decomp: degenerate cut from the game");

      if (res.outcome == GameCase::balanced_cut) {
        push_child(res.a_side, 1);
        push_child(res.r_side, 2);
        continue;
      }

      // Unbalanced: trim A to a certified expander, recurse on the rest.
      bool trimmed = false;
      const long long boundary = crossing_edges(comp_graph, res.a_side);
      const long long vol_a = volume(comp_graph, res.a_side);
      if (10.0 * static_cast<double>(boundary) <= phi * static_cast<double>(vol_a)) {
        try {
          auto kept_local = trim(comp_graph, res.a_side, phi);
          std::vector<Vertex> kept_orig;
          for (Vertex v : kept_local) kept_orig.push_back(comp_orig[v]);
          part.info.push_back(detail::certify_cluster(g, kept_orig, phi, opts));
          std::vector<char> kept_mask(comp_graph.n(), 0);
          for (Vertex v : kept_local) kept_mask[v] = 1;
          std::vector<Vertex> rest;
          for (Vertex v = 0; v < comp_graph.n(); ++v)
            if (!kept_mask[v]) rest.push_back(v);
          if (!rest.empty()) push_child(rest, 3);
          trimmed = true;
        } catch (const ContractViolation &) {
          trimmed = false;
        }
      }
      if (!trimmed) {
        // Precondition or contract failed at desk scale; recursing on both
        // sides keeps every output invariant intact.
        part.trim_fallbacks += 1;
        push_child(res.a_side, 1);
        push_child(res.r_side, 2);
      }
    }
  }

  std::sort(part.info.begin(), part.info.end(),
            [](const ClusterInfo &a, const ClusterInfo &b) { return a.vertices < b.vertices; });
  std::vector<int> cluster_of(g.n(), -1);
  for (std::size_t i = 0; i < part.info.size(); ++i) {
    part.clusters.push_back(part.info[i].vertices);
    for (Vertex v : part.info[i].vertices) {
      require_internal(cluster_of[v] < 0, "decomp: clusters overlap");
      cluster_of[v] = static_cast<int>(i);
    }
  }
  for (Vertex v = 0; v < g.n(); ++v)
    require_internal(cluster_of[v] >= 0, "decomp: vertex missing from every cluster");
  for (const auto &[u, v] : g.edges())
    if (u != v && cluster_of[u] != cluster_of[v]) part.inter_cluster_edges += 1;
  return part;
}

/// Independent recount used by tests and the CLI round-trip check.
inline long long recount_inter_cluster_edges(const MultiGraph &g,
                                             const std::vector<std::vector<Vertex>> &clusters) {
  std::vector<int> cluster_of(g.n(), -1);
  for (std::size_t i = 0; i < clusters.size(); ++i)
    for (Vertex v : clusters[i]) {
      require_input(cluster_of[v] < 0, "recount: clusters overlap");
      cluster_of[v] = static_cast<int>(i);
    }
  long long count = 0;
  for (const auto &[u, v] : g.edges()) {
    require_input(cluster_of[u] >= 0 && cluster_of[v] >= 0, "recount: uncovered vertex");
    if (u != v && cluster_of[u] != cluster_of[v]) ++count;
  }
  return count;
}

} // namespace expdec
