#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "expdec/errors.hpp"
#include "expdec/graph.hpp"
#include "expdec/matching.hpp"
#include "expdec/params.hpp"
#include "expdec/prng.hpp"
#include "expdec/rst.hpp"
#include "expdec/spectral.hpp"
#include "expdec/subdivision.hpp"
#include "expdec/unit_flow.hpp"

namespace expdec {

enum class GameCase { certified, balanced_cut, unbalanced_near_expander };

inline const char *game_case_name(GameCase c) {
  switch (c) {
  case GameCase::certified: return "certified";
  case GameCase::balanced_cut: return "balanced_cut";
  default: return "unbalanced_near_expander";
  }
}

struct RoundTrace {
  int t = 0;
  long long k = 0;            // |A_t (cap) X_E|
  long long a_left = 0;
  long long a_right = 0;
  double eta = 0.0;
  double sum_u_sq = 0.0;
  long long cut_size = 0;     // |S_t| in G_E
  long long vol_r = 0;        // vol_{G_E}(R) after the round
  long long max_edge_flow = 0;
  bool feasible = false;
};

struct GameOptions {
  bool collect_history = false; // keep per-round active sets and pair paths
  bool debug_checks = false;    // per-step engine checks + respects-subdivision audit
};

/// Game state over the subdivision graph. The surviving side A and the
/// removed side R partition V (cup) X_E; split-node coordinates are edge ids
/// of the base graph.
struct GameState {
  SubdivisionGraph sg;
  Params params;
  Rng rng;
  std::vector<char> in_a;            // over V(G_E)
  MatchingSequence matchings;        // pairs on split coordinates
  int t = 0;
  long long vol_r = 0;               // in G_E
  std::vector<long long> congestion; // cumulative |flow| per G_E edge
  bool rst_too_small = false;
  std::vector<RoundTrace> trace;
  GameOptions options;
  std::vector<std::vector<int>> active_history;        // coords after each round
  std::vector<std::vector<std::vector<EdgeId>>> paths; // G_E edge ids per matched pair

  std::vector<int> active_coords() const {
    std::vector<int> coords;
    for (EdgeId e = 0; e < sg.base.m(); ++e)
      if (in_a[sg.split_of(e)]) coords.push_back(e);
    return coords;
  }
};

inline GameState make_game(const MultiGraph &g, const Params &params,
                           const GameOptions &options = {}) {
  params.validate(g.m());
  GameState st{subdivide(g), params, Rng(params.seed), {}, {}, 0, 0, {}, false, {}, options, {}, {}};
  st.in_a.assign(st.sg.ge.n(), 1);
  st.congestion.assign(st.sg.ge.m(), 0);
  if (options.collect_history) st.active_history.push_back(st.active_coords());
  return st;
}

/// One round: project the implicit walk matrix onto a fresh random
/// direction, select sources and targets, route flow at capacity c in
/// G_E[A], turn the flow paths into a matching, and move the returned cut
/// from A to R. Throws InstanceTooSmall when the active side is too small
/// for the selection rule.
inline void game_step(GameState &st) {
  const Params &p = st.params;
  const int m = st.sg.base.m();
  std::vector<int> active = st.active_coords();
  if (static_cast<int>(active.size()) < p.rst_min_k)
    throw InstanceTooSmall("game_step: active split-node set below the selection minimum");

  Rng round_rng = st.rng.split();
  std::vector<double> r = sample_unit_vector(m, round_rng);
  ProjectionResult proj = project_power(st.matchings, active, r, p.d);
  SourceTargetSets sel = find_source_target_sets(proj, p.rst_min_k); // may throw

  std::sort(sel.a_left.begin(), sel.a_left.end());
  std::sort(sel.a_right.begin(), sel.a_right.end());

  InducedSubgraph sub = induced_subgraph(st.sg.ge, st.in_a);
  std::vector<Vertex> local_of(st.sg.ge.n(), -1);
  for (int i = 0; i < sub.g.n(); ++i) local_of[sub.to_parent[i]] = i;

  auto to_local = [&](const std::vector<int> &coords) {
    std::vector<Vertex> out;
    out.reserve(coords.size());
    for (int c : coords) {
      Vertex v = local_of[st.sg.split_of(c)];
      require_internal(v >= 0, "game_step: selected coordinate is not active");
      out.push_back(v);
    }
    return out;
  };
  std::vector<Vertex> left_local = to_local(sel.a_left);
  std::vector<Vertex> right_local = to_local(sel.a_right);

  if (p.mode == Mode::paper) {
    const long long sub_m = sub.g.m();
    require_internal(8 * static_cast<long long>(left_local.size()) <= sub_m,
                     "game_step: |A^l| above |E(G_E[A])|/8");
    require_internal(24 * static_cast<long long>(right_local.size()) >= 5 * sub_m,
                     "game_step: |A^r| below 5|E(G_E[A])|/24");
  }

  RouteFlowOutcome flow =
      route_flow(sub.g, left_local, right_local, p, st.options.debug_checks);

  long long max_edge_flow = 0;
  for (EdgeId le = 0; le < sub.g.m(); ++le) {
    const long long routed = std::llabs(flow.flow.flow[le]);
    max_edge_flow = std::max(max_edge_flow, routed);
    st.congestion[sub.edge_to_parent[le]] += routed;
  }
  require_internal(max_edge_flow <= p.c, "game_step: round flow exceeded capacity");

  std::vector<Vertex> surviving_sources;
  for (Vertex v : left_local)
    if (flow.alive[v]) surviving_sources.push_back(v);

  std::vector<std::vector<EdgeId>> local_paths;
  MatchingRound matched = flow_to_matching(sub.g, flow.flow, surviving_sources, right_local,
                                           st.options.collect_history ? &local_paths : nullptr,
                                           &flow.alive);

  MatchingRound round;
  round.round = st.t + 1;
  for (auto [a, b] : matched.pairs)
    round.pairs.emplace_back(st.sg.edge_of(sub.to_parent[a]), st.sg.edge_of(sub.to_parent[b]));
  round.validate(m);
  st.matchings.push_back(round);
  if (st.options.collect_history) {
    std::vector<std::vector<EdgeId>> ge_paths;
    for (auto &path : local_paths) {
      std::vector<EdgeId> ge_path;
      for (EdgeId le : path) ge_path.push_back(sub.edge_to_parent[le]);
      ge_paths.push_back(std::move(ge_path));
    }
    st.paths.push_back(std::move(ge_paths));
  }

  for (Vertex v : flow.cut) {
    Vertex parent = sub.to_parent[v];
    st.in_a[parent] = 0;
    st.vol_r += st.sg.ge.degree(parent);
  }
  st.t += 1;

  if (st.options.debug_checks) {
    std::vector<char> r_mask(st.sg.ge.n(), 0);
    for (Vertex v = 0; v < st.sg.ge.n(); ++v) r_mask[v] = st.in_a[v] ? 0 : 1;
    require_internal(respects_subdivision(st.sg, r_mask),
                     "game_step: (A, R) stopped respecting the subdivision");
  }
  if (p.mode == Mode::paper && st.vol_r > 0) {
    // union of the removed cuts stays sparse: Phi_{G_E}(R) <= 50/c
    std::vector<char> r_mask(st.sg.ge.n(), 0);
    for (Vertex v = 0; v < st.sg.ge.n(); ++v) r_mask[v] = st.in_a[v] ? 0 : 1;
    const long long cross = crossing_edges(st.sg.ge, r_mask);
    const long long denom = std::min(st.vol_r, st.sg.ge.total_volume() - st.vol_r);
    require_internal(denom > 0 && cross * p.c <= 50 * denom,
                     "game_step: removed side lost 50/c sparsity");
  }
  if (st.options.collect_history) st.active_history.push_back(st.active_coords());

  RoundTrace tr;
  tr.t = st.t;
  tr.k = static_cast<long long>(active.size());
  tr.a_left = static_cast<long long>(sel.a_left.size());
  tr.a_right = static_cast<long long>(sel.a_right.size());
  tr.eta = sel.eta;
  tr.sum_u_sq = projection_sum_sq(proj);
  tr.cut_size = static_cast<long long>(flow.cut.size());
  tr.vol_r = st.vol_r;
  tr.max_edge_flow = max_edge_flow;
  tr.feasible = flow.feasible;
  st.trace.push_back(tr);
}

struct CutMatchingResult {
  GameCase outcome = GameCase::certified;
  std::vector<Vertex> a_side; // regular vertices surviving in A
  std::vector<Vertex> r_side; // regular vertices moved to R
  int rounds = 0;
  long long vol_r = 0; // in G_E
  bool rst_too_small = false;
  std::vector<RoundTrace> trace;
  MatchingSequence matchings;
  std::vector<long long> congestion;
  std::vector<std::vector<int>> active_history;
  std::vector<std::vector<std::vector<EdgeId>>> paths;
};

/// The full game. Runs rounds while vol(R) <= m/(1500 Z) and t < T, then
/// classifies: t = T with R empty certifies expansion; t = T with R nonempty
/// is the unbalanced case; a volume break is the balanced case. A refused
/// selection (active side below the minimum) stops early and classifies the
/// current (A, R) the same way, with a diagnostic flag.
inline CutMatchingResult cut_matching(const MultiGraph &g, const Params &params,
                                      const GameOptions &options = {}) {
  require_input(is_connected(g), "cut_matching: graph must be connected");
  GameState st = make_game(g, params, options);
  const long long m = g.m();

  bool volume_break = false;
  while (st.t < params.T) {
    if (st.vol_r * 1500 * params.Z > m) {
      volume_break = true;
      break;
    }
    try {
      game_step(st);
    } catch (const InstanceTooSmall &) {
      st.rst_too_small = true;
      break;
    }
  }

  CutMatchingResult res;
  res.rounds = st.t;
  res.vol_r = st.vol_r;
  res.rst_too_small = st.rst_too_small;
  res.trace = std::move(st.trace);
  res.matchings = std::move(st.matchings);
  res.congestion = std::move(st.congestion);
  res.active_history = std::move(st.active_history);
  res.paths = std::move(st.paths);
  for (Vertex v = 0; v < g.n(); ++v)
    (st.in_a[v] ? res.a_side : res.r_side).push_back(v);

  // t = T takes precedence in the classification; an early refusal is
  // mapped by whatever the current (A, R) implies.
  if (res.r_side.empty()) {
    res.outcome = GameCase::certified;
  } else if (volume_break || (st.rst_too_small && st.vol_r * 1500 * params.Z > m)) {
    res.outcome = GameCase::balanced_cut;
  } else {
    res.outcome = GameCase::unbalanced_near_expander;
  }
  return res;
}

/// Conductance of the (A cap V, R cap V) split in the base graph; the
/// certified quantity for the balanced and unbalanced cases.
inline double result_cut_conductance(const MultiGraph &g, const CutMatchingResult &res) {
  require_input(!res.r_side.empty() && !res.a_side.empty(),
                "result_cut_conductance: not a proper cut");
  return conductance(g, Cut{res.r_side});
}

} // namespace expdec
