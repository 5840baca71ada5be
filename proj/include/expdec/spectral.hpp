#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "expdec/errors.hpp"
#include "expdec/matching.hpp"
#include "expdec/prng.hpp"

namespace expdec {

/// Uniform unit vector: independent standard normals, normalized.
inline std::vector<double> sample_unit_vector(int dim, Rng &rng) {
  require_input(dim >= 1, "sample_unit_vector: dim must be >= 1");
  std::vector<double> r(dim);
  double norm_sq = 0.0;
  for (;;) {
    norm_sq = 0.0;
    for (double &x : r) {
      x = rng.gaussian();
      norm_sq += x * x;
    }
    if (norm_sq > 1e-300) break;
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double &x : r) x *= inv;
  return r;
}

/// N x with N = ((d-1)/d) I + (1/d) M: every matched pair moves a 1/d step
/// toward each other, unmatched coordinates are fixed.
inline std::vector<double> apply_lazy_matching(const MatchingRound &m, std::vector<double> x,
                                               int d) {
  const double lazy = static_cast<double>(d - 1) / d;
  const double hop = 1.0 / d;
  for (auto [a, b] : m.pairs) {
    const double xa = x[a], xb = x[b];
    x[a] = lazy * xa + hop * xb;
    x[b] = lazy * xb + hop * xa;
  }
  return x;
}

/// Delta_t x: zero outside the active set, mean-free on it. Idempotent.
inline std::vector<double> apply_centering(std::span<const int> active, std::vector<double> x) {
  require_input(!active.empty(), "apply_centering: active set is empty");
  double sum = 0.0;
  for (int i : active) sum += x[i];
  const double mean = sum / static_cast<double>(active.size());
  std::vector<double> y(x.size(), 0.0);
  for (int i : active) y[i] = x[i] - mean;
  return y;
}

struct ProjectionResult {
  std::vector<double> u;       // full m-vector; zero outside the active set
  std::vector<int> active;     // the coordinates the projection lives on
  std::vector<double> r;       // the sampled direction, kept for audit
};

namespace detail {
inline void center_in_place(std::span<const int> active, std::vector<double> &x,
                            std::vector<double> &scratch) {
  double sum = 0.0;
  for (int i : active) sum += x[i];
  const double mean = sum / static_cast<double>(active.size());
  scratch.assign(x.size(), 0.0);
  for (int i : active) scratch[i] = x[i] - mean;
  x.swap(scratch);
}

inline void lazy_in_place(const MatchingRound &m, std::vector<double> &x, int d) {
  const double lazy = static_cast<double>(d - 1) / d;
  const double hop = 1.0 / d;
  for (auto [a, b] : m.pairs) {
    const double xa = x[a], xb = x[b];
    x[a] = lazy * xa + hop * xb;
    x[b] = lazy * xb + hop * xa;
  }
}
} // namespace detail

/// u_e = <W_t(x_e), r> for the active coordinates, where
/// W_t = (Delta_t F_t Delta_t)^d and F_t = N_t ... N_1 N_1 ... N_t, computed
/// by d sweeps of [center; N_t..N_1; N_1..N_t; center] in O(m t d) work.
/// W_t is never materialized.
inline ProjectionResult project_power(const MatchingSequence &matchings,
                                      std::span<const int> active, std::span<const double> r,
                                      int d) {
  require_input(!active.empty(), "project_power: active set is empty");
  require_input(d >= 2 && (d & (d - 1)) == 0, "project_power: d must be a power of two");
  const int m = static_cast<int>(r.size());
  for (int i : active) require_input(0 <= i && i < m, "project_power: active index out of range");
  for (const auto &round : matchings) round.validate(m);

  std::vector<double> y(r.begin(), r.end());
  std::vector<double> scratch;
  const int t = static_cast<int>(matchings.size());
  for (int rep = 0; rep < d; ++rep) {
    detail::center_in_place(active, y, scratch);
    for (int i = t - 1; i >= 0; --i) detail::lazy_in_place(matchings[i], y, d);
    for (int i = 0; i < t; ++i) detail::lazy_in_place(matchings[i], y, d);
    detail::center_in_place(active, y, scratch);
  }

  ProjectionResult out;
  out.u = std::move(y);
  out.active.assign(active.begin(), active.end());
  out.r.assign(r.begin(), r.end());
  return out;
}

inline double projection_sum(const ProjectionResult &p) {
  double s = 0.0;
  for (int i : p.active) s += p.u[i];
  return s;
}

inline double projection_sum_sq(const ProjectionResult &p) {
  double s = 0.0;
  for (int i : p.active) s += p.u[i] * p.u[i];
  return s;
}

} // namespace expdec
