#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "expdec/errors.hpp"
#include "expdec/spectral.hpp"

namespace expdec {

/// Source/target selection result. Orientation is explicit: when
/// left_is_high, min over a_left of u >= eta >= max over a_right of u;
/// otherwise the mirrored inequalities hold.
template <typename Scalar> struct RstSelection {
  std::vector<int> a_left;
  std::vector<int> a_right;
  Scalar eta{};
  bool left_is_high = true;
};

using SourceTargetSets = RstSelection<double>;

/// Literal evaluation of the four selection conditions over the given values:
///  (1) eta separates a_left from a_right,
///  (2) 2|a_right| >= k and 8|a_left| <= k,
///  (3) 9 (u_e - eta)^2 >= u_e^2 for every e in a_left,
///  (4) 80 * sum_{a_left} u^2 >= sum_all u^2.
/// Exact when Scalar is exact; `slack` absorbs rounding in double mode.
template <typename Scalar>
bool rst_conditions_hold(const std::vector<int> &ids, const std::vector<Scalar> &value_of,
                         const RstSelection<Scalar> &sel, double slack = 0.0) {
  const long long k = static_cast<long long>(ids.size());
  if (2 * static_cast<long long>(sel.a_right.size()) < k) return false;
  if (8 * static_cast<long long>(sel.a_left.size()) > k) return false;

  const Scalar zero{};
  auto leq = [&](const Scalar &a, const Scalar &b) {
    if (slack == 0.0) return !(b < a);
    return static_cast<double>(a) <= static_cast<double>(b) + slack;
  };

  for (int e : sel.a_left) {
    const Scalar &u = value_of[e];
    if (sel.left_is_high ? !leq(sel.eta, u) : !leq(u, sel.eta)) return false;
    const Scalar diff = u - sel.eta;
    if (!leq(u * u, diff * diff * Scalar(9))) return false;
  }
  for (int e : sel.a_right) {
    const Scalar &u = value_of[e];
    if (sel.left_is_high ? !leq(u, sel.eta) : !leq(sel.eta, u)) return false;
  }

  Scalar total = zero, left_mass = zero;
  for (int e : ids) total = total + value_of[e] * value_of[e];
  for (int e : sel.a_left) left_mass = left_mass + value_of[e] * value_of[e];
  return leq(total, left_mass * Scalar(80));
}

/// Finds (a_left, a_right, eta) satisfying the four conditions for any
/// zero-sum input with k >= min_k. One of the two sign orientations always
/// admits the prefix construction below; we try the original orientation
/// first and the mirrored one second, so the result is deterministic.
///
/// Construction, per orientation (values v = +-u, sorted descending, ties by
/// id): eta = max(0, v_(floor(k/2)+1)); a_left = the largest prefix of
/// positive coordinates with length <= floor(k/8) whose values stay >=
/// (3/2) eta; a_right = every coordinate with v <= eta. The prefix is
/// accepted when it carries at least 1/80 of the total square mass.
template <typename Scalar>
RstSelection<Scalar> rst_select(const std::vector<int> &ids, const std::vector<Scalar> &value_of,
                                int min_k) {
  const int k = static_cast<int>(ids.size());
  if (k < min_k)
    throw InstanceTooSmall("source/target selection requires an active set of size >= " +
                           std::to_string(min_k) + ", got " + std::to_string(k));

  const Scalar zero{};
  Scalar total = zero;
  for (int e : ids) total = total + value_of[e] * value_of[e];

  if (!(zero < total)) {
    // All-zero projection: empty source side, any half as targets, eta = 0.
    RstSelection<Scalar> sel;
    sel.a_right.assign(ids.begin(), ids.begin() + (k + 1) / 2);
    sel.eta = zero;
    sel.left_is_high = true;
    return sel;
  }

  for (int side = 0; side < 2; ++side) {
    const bool high = (side == 0);
    std::vector<int> order(ids);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Scalar va = high ? value_of[a] : zero - value_of[a];
      const Scalar vb = high ? value_of[b] : zero - value_of[b];
      if (va < vb) return false;
      if (vb < va) return true;
      return a < b;
    });
    auto val = [&](int rank) { return high ? value_of[order[rank]] : zero - value_of[order[rank]]; };

    const Scalar theta = val(k / 2); // (floor(k/2)+1)-th largest
    const Scalar eta = theta < zero ? zero : theta;

    int positives = 0;
    while (positives < k && zero < val(positives)) ++positives;
    int pmax = std::min(k / 8, positives);

    // Largest prefix whose minimum stays >= (3/2) eta: 2 v >= 3 eta.
    int p = 0;
    Scalar mass = zero;
    while (p < pmax) {
      const Scalar v = val(p);
      if (v + v < eta + eta + eta) break;
      mass = mass + v * v;
      ++p;
    }
    if (p == 0) continue;
    if (mass * Scalar(80) < total) continue;

    RstSelection<Scalar> sel;
    sel.left_is_high = high;
    sel.eta = high ? eta : zero - eta;
    sel.a_left.assign(order.begin(), order.begin() + p);
    for (int rank = p; rank < k; ++rank) {
      if (!(eta < val(rank))) sel.a_right.push_back(order[rank]);
    }
    require_internal(rst_conditions_hold(ids, value_of, sel),
                     "rst_select: construction violated its own conditions");
    return sel;
  }
  throw InternalError("rst_select: no orientation admits a valid selection (unreachable for k >= 16)");
}

/// Pipeline entry point; works on a projection over split-node coordinates.
inline SourceTargetSets find_source_target_sets(const ProjectionResult &p, int min_k = 16) {
  const double sum = projection_sum(p);
  const double tol = 1e-9 * std::max<double>(1.0, static_cast<double>(p.u.size()));
  require_input(std::abs(sum) <= tol, "find_source_target_sets: projection is not zero-sum");

  std::vector<double> values(p.u.size(), 0.0);
  for (int i : p.active) values[i] = p.u[i];
  auto sel = rst_select<double>(p.active, values, min_k);
  require_internal(rst_conditions_hold(p.active, values, sel, 1e-12),
                   "find_source_target_sets: post-conditions failed");
  return sel;
}

} // namespace expdec
