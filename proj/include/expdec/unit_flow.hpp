#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <vector>

#include "expdec/errors.hpp"
#include "expdec/graph.hpp"
#include "expdec/matching.hpp"
#include "expdec/params.hpp"

namespace expdec {

/// State of one flow problem. Flows are stored per edge, signed: a positive
/// value moves mass from edge.first to edge.second. Self-loops never carry
/// flow. Everything is integer; every push moves exactly one unit.
struct FlowState {
  std::vector<long long> source;   // Delta(v) >= 0
  std::vector<long long> flow;     // per edge, |flow| <= cap
  std::vector<int> label;          // l(v) in 0..h
  std::vector<long long> sink_cap; // T(v) >= 0
  long long cap = 0;               // uniform edge capacity c
};

inline FlowState make_flow_state(const MultiGraph &g, std::span<const Vertex> sources,
                                 std::span<const Vertex> sinks, long long cap) {
  g.check_vertex_set(sources);
  g.check_vertex_set(sinks);
  FlowState st;
  st.source.assign(g.n(), 0);
  st.flow.assign(g.m(), 0);
  st.label.assign(g.n(), 0);
  st.sink_cap.assign(g.n(), 0);
  st.cap = cap;
  for (Vertex v : sources) st.source[v] += 1;
  for (Vertex v : sinks) st.sink_cap[v] = 1;
  return st;
}

/// Bounded-height push-relabel on a (shrinking) vertex set.
///
/// Discharging always starts from an active vertex with the smallest label,
/// so a push target never has excess. A relabel moves the label directly to
/// one above the smallest residual neighbor label; that is where the
/// one-step rule lands after a chain of relabels during which nothing is
/// admissible.
class UnitFlowEngine {
public:
  struct LevelCutStats {
    long long i_star = 0;
    long long z1 = 0;
    long long vol = 0;
    double bound = 0.0;
  };

  struct RemovalStats {
    long long delta_f = 0;      // sum over survivors of max(0, -inflow from S)
    long long source_added = 0; // total new source mass
    long long vol_removed = 0;  // volume of S before removal (alive degrees)
  };

  UnitFlowEngine(const MultiGraph &g, FlowState st, long long h, bool debug_checks = false)
      : g_(g), st_(std::move(st)), h_(h), debug_(debug_checks) {
    require_input(h_ >= 1, "unit flow: h must be >= 1");
    require_input(static_cast<int>(st_.source.size()) == g_.n() &&
                      static_cast<int>(st_.label.size()) == g_.n() &&
                      static_cast<int>(st_.sink_cap.size()) == g_.n() &&
                      static_cast<int>(st_.flow.size()) == g_.m(),
                  "unit flow: state sizes do not match the graph");
    alive_.assign(g_.n(), 1);
    cur_.assign(g_.n(), 0);
    deg_alive_.assign(g_.n(), 0);
    for (Vertex v = 0; v < g_.n(); ++v) deg_alive_[v] = g_.degree(v);
    mass_.assign(g_.n(), 0);
    for (Vertex v = 0; v < g_.n(); ++v) mass_[v] = st_.source[v];
    for (EdgeId e = 0; e < g_.m(); ++e) {
      auto [u, v] = g_.edge(e);
      if (u == v) continue;
      mass_[v] += st_.flow[e];
      mass_[u] -= st_.flow[e];
    }
    validate_entry_state();
    for (Vertex v = 0; v < g_.n(); ++v) activate(v);
  }

  /// Throws InputError unless the state is G-valid: capacities respected,
  /// f(v) >= 0, labeled vertices have saturated sinks, and any edge dropping
  /// more than one level is saturated.
  void validate_entry_state() const {
    for (Vertex v = 0; v < g_.n(); ++v) {
      require_input(st_.source[v] >= 0, "unit flow: negative source mass");
      require_input(st_.sink_cap[v] >= 0, "unit flow: negative sink capacity");
      require_input(0 <= st_.label[v] && st_.label[v] <= h_, "unit flow: label out of range");
      require_input(mass_[v] >= 0, "unit flow: state is not a preflow (f(v) < 0)");
      if (st_.label[v] >= 1)
        require_input(mass_[v] >= st_.sink_cap[v],
                      "unit flow: labeled vertex with unsaturated sink");
    }
    for (EdgeId e = 0; e < g_.m(); ++e) {
      auto [u, v] = g_.edge(e);
      if (u == v) {
        require_input(st_.flow[e] == 0, "unit flow: self-loop carries flow");
        continue;
      }
      require_input(std::llabs(st_.flow[e]) <= st_.cap, "unit flow: edge over capacity");
      if (st_.label[u] > st_.label[v] + 1)
        require_input(st_.flow[e] == st_.cap, "unit flow: steep edge not saturated");
      if (st_.label[v] > st_.label[u] + 1)
        require_input(st_.flow[e] == -st_.cap, "unit flow: steep edge not saturated");
    }
  }

  long long mass(Vertex v) const { return mass_[v]; }
  long long excess(Vertex v) const { return std::max<long long>(mass_[v] - st_.sink_cap[v], 0); }
  bool alive(Vertex v) const { return alive_[v] != 0; }
  const std::vector<char> &alive_mask() const { return alive_; }
  const FlowState &state() const { return st_; }
  FlowState take_state() && { return std::move(st_); }
  const LevelCutStats &last_cut_stats() const { return cut_stats_; }

  long long alive_volume() const {
    long long vol = 0;
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v]) vol += deg_alive_[v];
    return vol;
  }

  long long total_excess() const {
    long long ex = 0;
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v]) ex += excess(v);
    return ex;
  }

  /// Push/relabel until no vertex with label < h has excess.
  void run() {
    while (!queue_.empty()) {
      auto [lab, v] = queue_.top();
      queue_.pop();
      if (!alive_[v] || st_.label[v] != lab || lab >= h_ || excess(v) == 0) continue;
      discharge(v);
    }
    if (debug_) {
      for (Vertex v = 0; v < g_.n(); ++v)
        if (alive_[v] && st_.label[v] < h_)
          require_internal(mass_[v] <= st_.sink_cap[v],
                           "unit flow: active vertex left after run()");
    }
  }

  bool has_blocked_excess() const {
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v] && st_.label[v] == h_ && excess(v) > 0) return true;
    return false;
  }

  /// Level-cut extraction (requires a vertex at label h). Sweeps i downward
  /// from h-1 and takes the first S_i = {v : l(v) >= i} whose count of
  /// (i, i-1) boundary edges is within (5 ln(2 m_bound) / h) vol(S_i); then
  /// drops vertices with at most one unit of source whose alive neighbors
  /// all lie below the cut.
  std::vector<Vertex> level_cut(long long m_for_bound) {
    require_internal(m_for_bound >= 1, "level_cut: bad edge bound");
    std::vector<Vertex> by_label;
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v] && st_.label[v] >= 1) by_label.push_back(v);
    require_internal(!by_label.empty(), "level_cut: no labeled vertex");
    std::sort(by_label.begin(), by_label.end(),
              [&](Vertex a, Vertex b) { return st_.label[a] > st_.label[b]; });
    require_internal(st_.label[by_label.front()] == h_, "level_cut: no vertex at label h");

    const double coef =
        5.0 * std::log(2.0 * static_cast<double>(m_for_bound)) / static_cast<double>(h_);
    long long vol = 0;
    std::size_t idx = 0;
    while (idx < by_label.size() && st_.label[by_label[idx]] == h_)
      vol += deg_alive_[by_label[idx++]];

    bool found = false;
    long long i_star = 0;
    for (long long i = h_ - 1; i >= 1; --i) {
      const std::size_t level_begin = idx;
      while (idx < by_label.size() && st_.label[by_label[idx]] == i)
        vol += deg_alive_[by_label[idx++]];
      long long z1 = 0;
      for (std::size_t j = level_begin; j < idx; ++j) {
        for (auto [u, e] : g_.incident(by_label[j])) {
          (void)e;
          if (u != by_label[j] && alive_[u] && st_.label[u] == i - 1) ++z1;
        }
      }
      if (static_cast<double>(z1) <= coef * static_cast<double>(vol)) {
        found = true;
        i_star = i;
        cut_stats_ = {i, z1, vol, coef * static_cast<double>(vol)};
        break;
      }
    }
    require_internal(found, "level_cut: sweep found no qualifying level (h too small)");

    std::vector<Vertex> cut;
    std::vector<char> in_cut(g_.n(), 0);
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v] && st_.label[v] >= i_star) {
        cut.push_back(v);
        in_cut[v] = 1;
      }

    std::vector<Vertex> final_cut;
    for (Vertex v : cut) {
      bool neighbor_inside = false, has_neighbor = false;
      for (auto [u, e] : g_.incident(v)) {
        (void)e;
        if (u == v || !alive_[u]) continue;
        has_neighbor = true;
        if (in_cut[u]) {
          neighbor_inside = true;
          break;
        }
      }
      if (st_.source[v] <= 1 && has_neighbor && !neighbor_inside) continue;
      final_cut.push_back(v);
    }
    if (debug_) {
      std::vector<char> kept(g_.n(), 0);
      for (Vertex v : final_cut) kept[v] = 1;
      for (Vertex v = 0; v < g_.n(); ++v)
        if (alive_[v] && st_.label[v] == h_)
          require_internal(kept[v], "level_cut: blocked vertex escaped the cut");
    }
    require_internal(!final_cut.empty(), "level_cut: cut came out empty");
    return final_cut;
  }

  /// Removes S and compensates surviving neighbors. With per_edge_source < 0
  /// the source of u grows by max(0, total inflow from S), the dynamic rule;
  /// otherwise it grows by per_edge_source units per removed edge, which
  /// dominates the inflow (at most cap per edge).
  RemovalStats remove(const std::vector<Vertex> &s, long long per_edge_source = -1) {
    RemovalStats stats;
    for (Vertex v : s) {
      require_internal(alive_[v], "remove: vertex already removed");
      stats.vol_removed += deg_alive_[v];
    }
    for (Vertex v : s) alive_[v] = 0;
    std::vector<long long> inflow(g_.n(), 0);
    std::vector<long long> cut_edges(g_.n(), 0);
    std::vector<Vertex> touched;
    for (Vertex v : s) {
      for (auto [u, e] : g_.incident(v)) {
        if (u == v) continue;
        if (alive_[u]) {
          const long long f_vu = (g_.edge(e).first == v) ? st_.flow[e] : -st_.flow[e];
          if (cut_edges[u] == 0) touched.push_back(u);
          inflow[u] += f_vu;
          cut_edges[u] += 1;
          mass_[u] -= f_vu;
          deg_alive_[u] -= 1;
        }
        st_.flow[e] = 0;
      }
    }
    for (Vertex u : touched) {
      long long add = per_edge_source >= 0 ? per_edge_source * cut_edges[u]
                                           : std::max<long long>(0, inflow[u]);
      require_internal(add >= inflow[u], "remove: compensation below inflow");
      st_.source[u] += add;
      mass_[u] += add;
      stats.source_added += add;
      stats.delta_f += std::max<long long>(0, -inflow[u]);
      activate(u);
    }
    return stats;
  }

private:
  void activate(Vertex v) {
    if (alive_[v] && st_.label[v] < h_ && excess(v) > 0) queue_.emplace(st_.label[v], v);
  }

  long long signed_flow_from(Vertex v, EdgeId e) const {
    return g_.edge(e).first == v ? st_.flow[e] : -st_.flow[e];
  }

  void discharge(Vertex v) {
    const auto arcs = g_.incident(v);
    while (excess(v) > 0) {
      if (cur_[v] >= static_cast<int>(arcs.size())) {
        relabel(v); // yield; the queue re-selects the smallest label
        return;
      }
      auto [u, e] = arcs[cur_[v]];
      if (u != v && alive_[u] && st_.label[v] == st_.label[u] + 1 &&
          signed_flow_from(v, e) < st_.cap) {
        push_unit(v, u, e);
        if (excess(u) > 0) {
          // The target is now the strictly smallest active label; yield.
          activate(u);
          activate(v);
          return;
        }
      } else {
        ++cur_[v];
      }
    }
  }

  void push_unit(Vertex v, Vertex u, EdgeId e) {
    if (debug_) {
      require_internal(excess(u) == 0, "push: target already has excess");
      require_internal(signed_flow_from(v, e) < st_.cap, "push: no residual capacity");
      require_internal(st_.label[v] == st_.label[u] + 1, "push: labels not adjacent");
    }
    st_.flow[e] += (g_.edge(e).first == v) ? 1 : -1;
    mass_[v] -= 1;
    mass_[u] += 1;
  }

  void relabel(Vertex v) {
    long long lowest = h_;
    for (auto [u, e] : g_.incident(v)) {
      if (u == v || !alive_[u]) continue;
      if (signed_flow_from(v, e) < st_.cap) lowest = std::min<long long>(lowest, st_.label[u] + 1);
    }
    if (debug_) require_internal(lowest > st_.label[v], "relabel: label did not increase");
    st_.label[v] = static_cast<int>(std::min<long long>(lowest, h_));
    cur_[v] = 0;
    activate(v);
  }

  const MultiGraph &g_;
  FlowState st_;
  long long h_;
  bool debug_;
  std::vector<char> alive_;
  std::vector<long long> mass_;
  std::vector<int> cur_;
  std::vector<int> deg_alive_;
  std::priority_queue<std::pair<int, int>, std::vector<std::pair<int, int>>,
                      std::greater<std::pair<int, int>>>
      queue_;
  LevelCutStats cut_stats_;
};

/// One bounded-height run on the whole graph: returns the settled state and
/// the level cut (empty when the flow is feasible). The input must be
/// G-valid; the output is a G-valid solution.
inline std::pair<FlowState, std::vector<Vertex>> unit_flow(const MultiGraph &g, long long h,
                                                           FlowState state,
                                                           bool debug_checks = false) {
  UnitFlowEngine engine(g, std::move(state), h, debug_checks);
  engine.run();
  std::vector<Vertex> cut;
  if (engine.has_blocked_excess()) cut = engine.level_cut(std::max(1, g.m()));
  return {std::move(engine).take_state(), std::move(cut)};
}

/// Level-cut extraction on an explicit settled state (test hook).
inline std::vector<Vertex> level_cut(const MultiGraph &g, FlowState state, long long h) {
  UnitFlowEngine engine(g, std::move(state), h);
  require_input(engine.has_blocked_excess(), "level_cut: no vertex blocked at label h");
  return engine.level_cut(std::max(1, g.m()));
}

struct RouteFlowRound {
  long long cut_size = 0;
  long long cut_vol = 0;
  long long delta_f = 0;
  long long excess_left = 0;
  UnitFlowEngine::LevelCutStats stats;
};

/// Result of the multi-round driver. When feasible, `cut` is empty and
/// `flow` routes one unit out of every source. Otherwise `cut` is S' with
/// the closure property, and `flow` is feasible for the problem restricted
/// to the survivors (flows on removed arcs are zero).
struct RouteFlowOutcome {
  bool feasible = false;
  std::vector<Vertex> cut;
  FlowState flow;
  std::vector<char> alive;
  long long f_total = 0;
  std::vector<RouteFlowRound> rounds;
};

/// Runs unit-flow rounds, removing each level cut and compensating the
/// survivors' sources, until a round settles without blocked excess.
/// Sources carry one unit each, sinks capacity one, every edge capacity c.
/// In paper mode the stated size preconditions and the flow accounting
/// (delta f per round, f_total <= m/6, survivor volume >= m/24) are
/// enforced, not just recorded.
inline RouteFlowOutcome route_flow(const MultiGraph &g, std::span<const Vertex> a_left,
                                   std::span<const Vertex> a_right, const Params &params,
                                   bool debug_checks = false) {
  g.check_vertex_set(a_left);
  g.check_vertex_set(a_right);
  require_input(params.c >= 2, "route_flow: capacity must be >= 2");
  {
    std::vector<char> left_mask(g.n(), 0);
    for (Vertex v : a_left) {
      require_input(!left_mask[v], "route_flow: duplicate source");
      left_mask[v] = 1;
    }
    for (Vertex v : a_right)
      require_input(!left_mask[v], "route_flow: sources and sinks must be disjoint");
  }
  const long long m = g.m();
  if (params.mode == Mode::paper) {
    require_input(params.c > 1000, "route_flow (paper mode): capacity must exceed 1000");
    require_input(8 * static_cast<long long>(a_left.size()) <= m,
                  "route_flow (paper mode): |A^l| > m/8");
    require_input(24 * static_cast<long long>(a_right.size()) >= 5 * m,
                  "route_flow (paper mode): |A^r| < 5m/24");
  }

  UnitFlowEngine engine(g, make_flow_state(g, a_left, a_right, params.c), params.h, debug_checks);
  RouteFlowOutcome out;
  out.f_total = static_cast<long long>(a_left.size());
  std::vector<char> removed(g.n(), 0);
  long long iterations = 0;
  const long long iteration_cap = std::max<long long>(std::max<long long>(g.n(), m), 1);
  const bool delta_bound_applies =
      5.0 * std::log(2.0 * std::max<double>(static_cast<double>(m), 1.0)) *
          static_cast<double>(params.c) <=
      0.006 * static_cast<double>(params.h);
  long long cut_sinks = 0; // sinks inside the union of the level cuts
  for (;;) {
    engine.run();
    if (!engine.has_blocked_excess()) break;
    require_internal(++iterations <= iteration_cap, "route_flow: iteration cap exceeded");
    auto cut = engine.level_cut(std::max(1, g.m()));
    auto stats = engine.remove(cut);
    out.f_total += stats.delta_f;
    for (Vertex v : cut) {
      removed[v] = 1;
      if (engine.state().sink_cap[v] > 0) ++cut_sinks;
    }
    out.rounds.push_back({static_cast<long long>(cut.size()), stats.vol_removed, stats.delta_f,
                          engine.total_excess(), engine.last_cut_stats()});
    if (params.mode == Mode::paper) {
      if (delta_bound_applies)
        require_internal(1000 * stats.delta_f <= 6 * stats.vol_removed,
                         "route_flow: delta f exceeded (6/1000) vol(S)");
      require_internal(6 * out.f_total <= m, "route_flow: f_total exceeded m/6");
      require_internal(cut_sinks <= out.f_total,
                       "route_flow: more sinks removed than routed mass");
    }
  }

  if (params.mode == Mode::paper && iterations > 0) {
    long long alive_vol = 0;
    for (Vertex v = 0; v < g.n(); ++v)
      if (!removed[v]) alive_vol += g.degree(v);
    require_internal(24 * alive_vol >= m, "route_flow: survivor volume below m/24");
  }

  // Closure: a survivor whose every neighbor was removed is isolated; fold it
  // into the cut. A vertex whose neighbors all survive can never be cut.
  for (Vertex v = 0; v < g.n(); ++v) {
    if (removed[v]) continue;
    bool has_neighbor = false, has_alive_neighbor = false;
    for (auto [u, e] : g.incident(v)) {
      (void)e;
      if (u == v) continue;
      has_neighbor = true;
      if (!removed[u]) {
        has_alive_neighbor = true;
        break;
      }
    }
    if (has_neighbor && !has_alive_neighbor) removed[v] = 1;
  }

  out.alive.assign(g.n(), 1);
  for (Vertex v = 0; v < g.n(); ++v) out.alive[v] = removed[v] ? 0 : 1;
  for (Vertex v = 0; v < g.n(); ++v)
    if (removed[v]) out.cut.push_back(v);
  out.feasible = out.cut.empty();
  out.flow = std::move(engine).take_state();
  for (EdgeId e = 0; e < g.m(); ++e) {
    auto [u, v] = g.edge(e);
    if (removed[u] || removed[v]) out.flow.flow[e] = 0;
  }

  if (params.mode == Mode::paper && !out.feasible) {
    long long alive_vol = 0;
    for (Vertex v = 0; v < g.n(); ++v)
      if (!removed[v]) alive_vol += g.degree(v);
    require_internal(26 * alive_vol >= m, "route_flow: survivor volume below m/26");
  }
  return out;
}

/// Decomposes an integral feasible flow into unit paths and pairs each
/// source with the sink its first unit reaches. Cycles met along a walk are
/// cancelled in place. Every matched sink absorbs at most one unit because
/// sink capacities are one. `alive`, when given, restricts the audit and the
/// walks to the surviving subgraph (removed arcs must already carry zero).
inline MatchingRound flow_to_matching(const MultiGraph &g, const FlowState &state,
                                      std::span<const Vertex> sources,
                                      std::span<const Vertex> sinks,
                                      std::vector<std::vector<EdgeId>> *paths = nullptr,
                                      const std::vector<char> *alive = nullptr) {
  g.check_vertex_set(sources);
  g.check_vertex_set(sinks);
  auto live = [&](Vertex v) { return alive == nullptr || (*alive)[v] != 0; };
  std::vector<long long> remaining(g.m(), 0);
  std::vector<Vertex> tail(g.m(), -1);
  for (EdgeId e = 0; e < g.m(); ++e) {
    auto [u, v] = g.edge(e);
    if (u == v) continue;
    if (!live(u) || !live(v)) {
      require_input(state.flow[e] == 0, "flow_to_matching: flow on a removed arc");
      continue;
    }
    if (state.flow[e] > 0) {
      remaining[e] = state.flow[e];
      tail[e] = u;
    } else if (state.flow[e] < 0) {
      remaining[e] = -state.flow[e];
      tail[e] = v;
    }
  }
  std::vector<long long> absorb(g.n(), 0);
  {
    std::vector<long long> mass(g.n(), 0);
    for (Vertex v = 0; v < g.n(); ++v) mass[v] = state.source[v];
    for (EdgeId e = 0; e < g.m(); ++e) {
      auto [u, v] = g.edge(e);
      if (u == v) continue;
      mass[v] += state.flow[e];
      mass[u] -= state.flow[e];
    }
    for (Vertex v = 0; v < g.n(); ++v) {
      if (!live(v)) continue;
      require_input(mass[v] >= 0, "flow_to_matching: not a preflow");
      require_input(mass[v] <= state.sink_cap[v], "flow_to_matching: flow is not feasible");
      absorb[v] = mass[v];
    }
  }
  std::vector<char> is_sink(g.n(), 0);
  for (Vertex v : sinks) is_sink[v] = 1;

  MatchingRound round;
  if (paths) paths->clear();
  std::vector<int> stack_pos(g.n(), -1);
  for (Vertex s : sources) {
    require_input(live(s), "flow_to_matching: removed source");
    require_input(state.source[s] >= 1, "flow_to_matching: source ships nothing");
    std::vector<std::pair<Vertex, EdgeId>> stack;
    Vertex at = s;
    stack_pos[s] = 0;
    stack.push_back({s, -1});
    for (;;) {
      if (at != s && absorb[at] > 0) {
        absorb[at] -= 1;
        break;
      }
      EdgeId taken = -1;
      Vertex next = -1;
      for (auto [u, e] : g.incident(at)) {
        if (u == at) continue;
        if (tail[e] == at && remaining[e] > 0) {
          taken = e;
          next = u;
          break;
        }
      }
      require_internal(taken >= 0, "flow_to_matching: walk stuck (conservation broken)");
      remaining[taken] -= 1;
      stack.back().second = taken;
      if (stack_pos[next] >= 0) {
        // erase the cycle just closed; its units stay cancelled
        while (static_cast<int>(stack.size()) > stack_pos[next] + 1) {
          stack_pos[stack.back().first] = -1;
          stack.pop_back();
        }
        at = next;
        continue;
      }
      stack_pos[next] = static_cast<int>(stack.size());
      stack.push_back({next, -1});
      at = next;
    }
    require_internal(is_sink[at], "flow_to_matching: unit ended outside the sink set");
    round.pairs.emplace_back(s, at);
    if (paths) {
      std::vector<EdgeId> path;
      for (std::size_t i = 0; i + 1 < stack.size(); ++i) path.push_back(stack[i].second);
      paths->push_back(std::move(path));
    }
    for (auto &[v, e] : stack) {
      (void)e;
      stack_pos[v] = -1;
    }
  }
  return round;
}

} // namespace expdec
