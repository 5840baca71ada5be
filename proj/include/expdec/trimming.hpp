#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "expdec/errors.hpp"
#include "expdec/graph.hpp"
#include "expdec/oracles.hpp"
#include "expdec/unit_flow.hpp"

namespace expdec {

struct TrimReport {
  std::vector<Vertex> kept;
  long long boundary_before = 0;
  long long boundary_after = 0;
  long long vol_before = 0;
  long long vol_after = 0;
  std::string cert_method; // brute | eigenvalue | none
  double cert_value = 0.0;
  int rounds = 0;
};

/// Shaves a near-expander A down to a certified expander A'.
///
/// Flow formulation: every boundary edge of the current survivor set injects
/// q = ceil(2/phi) units at its inner endpoint, each vertex is a sink of
/// capacity deg_G(v), edges carry capacity q, and excess-carrying level cuts
/// are removed until the flow settles. Newly exposed boundary edges inject
/// q as well (q dominates any inflow the removal cancels, so validity is
/// preserved).
///
/// Contract, checked on exit: vol(A') >= vol(A) - (4/phi)|E(A, ~A)| and
/// |E(A', ~A')| <= 2|E(A, ~A)| always; conductance of G{A'} at least phi/6
/// by brute force up to 16 vertices, by the Laplacian eigenvalue bound up to
/// the dense cap, unchecked above that.
inline TrimReport trim_report(const MultiGraph &g, std::span<const Vertex> a, double phi,
                              bool debug_checks = false) {
  require_input(phi > 0.0 && phi < 1.0, "trim: phi must be in (0,1)");
  g.check_vertex_set(a);
  auto in_a = member_mask(g, a);

  const long long vol_a = volume(g, a);
  long long boundary = 0;
  for (const auto &[u, v] : g.edges())
    if (in_a[u] != in_a[v]) ++boundary;
  require_input(10.0 * static_cast<double>(boundary) <= phi * static_cast<double>(vol_a),
                "trim: boundary larger than phi vol(A)/10");

  TrimReport rep;
  rep.boundary_before = boundary;
  rep.vol_before = vol_a;

  const long long q = static_cast<long long>(std::ceil(2.0 / phi));
  InducedSubgraph sub = induced_subgraph(g, in_a);
  const long long h = std::max<long long>(
      4, static_cast<long long>(
             std::ceil(40.0 * std::log(2.0 * std::max<double>(g.m(), 2.0)) / phi)));

  FlowState st;
  st.source.assign(sub.g.n(), 0);
  st.flow.assign(sub.g.m(), 0);
  st.label.assign(sub.g.n(), 0);
  st.sink_cap.assign(sub.g.n(), 0);
  st.cap = q;
  for (int i = 0; i < sub.g.n(); ++i) st.sink_cap[i] = g.degree(sub.to_parent[i]);
  for (const auto &[u, v] : g.edges()) {
    if (in_a[u] != in_a[v]) {
      Vertex inner = in_a[u] ? u : v;
      // local index: sub keeps increasing-id order
      auto it = std::lower_bound(sub.to_parent.begin(), sub.to_parent.end(), inner);
      st.source[static_cast<int>(it - sub.to_parent.begin())] += q;
    }
  }

  UnitFlowEngine engine(sub.g, std::move(st), h, debug_checks);
  long long iterations = 0;
  for (;;) {
    engine.run();
    if (!engine.has_blocked_excess()) break;
    require_internal(++iterations <= sub.g.n() + 1, "trim: iteration cap exceeded");
    auto cut = engine.level_cut(std::max(1, sub.g.m()));
    engine.remove(cut, /*per_edge_source=*/q);
    rep.rounds += 1;
  }

  for (int i = 0; i < sub.g.n(); ++i)
    if (engine.alive(i)) rep.kept.push_back(sub.to_parent[i]);
  require_internal(!rep.kept.empty(), "trim: everything was shaved away");

  auto kept_mask = member_mask(g, rep.kept);
  rep.vol_after = volume(g, rep.kept);
  rep.boundary_after = crossing_edges(g, kept_mask);

  require_internal(static_cast<double>(rep.vol_after) >=
                       static_cast<double>(vol_a) -
                           (4.0 / phi) * static_cast<double>(boundary) - 1e-9,
                   "trim: volume clause failed");
  require_internal(rep.boundary_after <= 2 * boundary, "trim: boundary clause failed");

  MultiGraph certified = induced_with_loops(g, rep.kept);
  if (certified.n() == 1) {
    rep.cert_method = "brute";
    rep.cert_value = 1.0;
  } else if (certified.n() <= 16) {
    rep.cert_method = "brute";
    rep.cert_value = brute_force_min_conductance(certified).value;
  } else if (certified.n() <= 400) {
    rep.cert_method = "eigenvalue";
    rep.cert_value = normalized_laplacian_lambda2(certified) / 2.0;
  } else {
    rep.cert_method = "none";
    rep.cert_value = 0.0;
  }
  if (rep.cert_method != "none")
    require_internal(rep.cert_value + 1e-12 >= phi / 6.0, "trim: conductance clause failed");
  return rep;
}

inline std::vector<Vertex> trim(const MultiGraph &g, std::span<const Vertex> a, double phi) {
  return trim_report(g, a, phi).kept;
}

} // namespace expdec
