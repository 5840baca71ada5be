#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "expdec/errors.hpp"
#include "expdec/graph.hpp"
#include "expdec/matching.hpp"
#include "expdec/rst.hpp"
#include "expdec/subdivision.hpp"

namespace expdec {

// ---------------------------------------------------------------------------
// Exact rational arithmetic for the selection checkers. Small by design:
// enough for zero-sum test vectors, not a general bignum.
// ---------------------------------------------------------------------------

class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {} // NOLINT: implicit by design
  Rational(long long num, long long den) : num_(num), den_(den) {
    require_input(den != 0, "Rational: zero denominator");
    normalize();
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  friend Rational operator+(const Rational &a, const Rational &b) {
    return Rational::from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                             i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational &a, const Rational &b) {
    return Rational::from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                             i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational &a, const Rational &b) {
    return Rational::from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend bool operator<(const Rational &a, const Rational &b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator==(const Rational &a, const Rational &b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  explicit operator double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

private:
  using i128 = __int128;

  static Rational from128(i128 num, i128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    i128 g = gcd128(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    require_internal(num <= INT64_MAX && num >= INT64_MIN && den <= INT64_MAX,
                     "Rational: overflow");
    Rational r;
    r.num_ = static_cast<long long>(num);
    r.den_ = static_cast<long long>(den);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    auto r = from128(num_, den_);
    num_ = r.num_;
    den_ = r.den_;
  }

  long long num_;
  long long den_;
};

/// Literal evaluation of the four source/target-selection conditions.
/// Exact when Scalar is Rational.
template <typename Scalar>
bool check_rst_conditions(const std::vector<int> &ids, const std::vector<Scalar> &values,
                          const RstSelection<Scalar> &sel, double slack = 0.0) {
  return rst_conditions_hold(ids, values, sel, slack);
}

// ---------------------------------------------------------------------------
// Dense references for the implicitly maintained matrices.
// ---------------------------------------------------------------------------

struct DenseFlowMatrix {
  Eigen::MatrixXd entries;
  std::vector<int> active;
};

inline void require_oracle_cap(int m, int cap) {
  require_input(m <= cap, "oracle refuses instances above " + std::to_string(cap) +
                              " coordinates (got " + std::to_string(m) + ")");
}

inline Eigen::MatrixXd dense_lazy_matching(const MatchingRound &round, int m, int d) {
  Eigen::MatrixXd n_mat = Eigen::MatrixXd::Identity(m, m) * (static_cast<double>(d - 1) / d);
  Eigen::VectorXd diag_extra = Eigen::VectorXd::Constant(m, 1.0 / d);
  for (auto [a, b] : round.pairs) {
    n_mat(a, b) += 1.0 / d;
    n_mat(b, a) += 1.0 / d;
    diag_extra(a) = 0.0;
    diag_extra(b) = 0.0;
  }
  n_mat.diagonal() += diag_extra;
  return n_mat;
}

inline Eigen::MatrixXd dense_centering(const std::vector<int> &active, int m) {
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(m, m);
  const double inv_k = 1.0 / static_cast<double>(active.size());
  for (int i : active) delta(i, i) = 1.0;
  for (int i : active)
    for (int j : active) delta(i, j) -= inv_k;
  return delta;
}

/// F_t from the recurrence F_0 = I, F_{t+1} = N_{t+1} F_t N_{t+1}.
inline Eigen::MatrixXd dense_flow_matrix(const MatchingSequence &matchings, int m, int d,
                                         int cap = 64) {
  require_oracle_cap(m, cap);
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(m, m);
  for (const auto &round : matchings) {
    round.validate(m);
    Eigen::MatrixXd n_mat = dense_lazy_matching(round, m, d);
    f = n_mat * f * n_mat;
  }
  return f;
}

/// W_t = (Delta_t F_t Delta_t)^d and psi = tr(W_t^2), computed through the
/// eigenvalues of the symmetric base matrix.
inline std::pair<Eigen::MatrixXd, double> dense_W_and_potential(const Eigen::MatrixXd &f,
                                                                const std::vector<int> &active,
                                                                int d, int cap = 64) {
  const int m = static_cast<int>(f.rows());
  require_oracle_cap(m, cap);
  require_input(!active.empty(), "dense_W_and_potential: empty active set");
  Eigen::MatrixXd delta = dense_centering(active, m);
  Eigen::MatrixXd base = delta * f * delta;
  base = 0.5 * (base + base.transpose()); // symmetrize rounding noise
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(base);
  require_internal(es.info() == Eigen::Success, "eigensolve failed");
  Eigen::VectorXd lam = es.eigenvalues();
  Eigen::VectorXd lam_d = lam.array().pow(d);
  Eigen::MatrixXd w = es.eigenvectors() * lam_d.asDiagonal() * es.eigenvectors().transpose();
  double psi = lam.array().pow(2 * d).sum();
  return {w, psi};
}

inline double dense_potential(const Eigen::MatrixXd &f, const std::vector<int> &active, int d,
                              int cap = 64) {
  return dense_W_and_potential(f, active, d, cap).second;
}

/// Largest singular value of Delta F Delta (= max |eigenvalue|; symmetric).
inline double top_singular_value(const Eigen::MatrixXd &f, const std::vector<int> &active) {
  Eigen::MatrixXd delta = dense_centering(active, static_cast<int>(f.rows()));
  Eigen::MatrixXd base = delta * f * delta;
  base = 0.5 * (base + base.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(base);
  require_internal(es.info() == Eigen::Success, "eigensolve failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline std::pair<double, double> eigenvalue_range(const Eigen::MatrixXd &sym) {
  Eigen::MatrixXd s = 0.5 * (sym + sym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  require_internal(es.info() == Eigen::Success, "eigensolve failed");
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

// ---------------------------------------------------------------------------
// Brute-force expansion checkers (enumeration caps keep suites fast).
// ---------------------------------------------------------------------------

struct MinConductanceResult {
  std::int64_t crossing = 0;
  std::int64_t vol = 0;
  double value = 0.0;
  std::vector<Vertex> witness;
};

/// Exact min over all cuts with 0 < vol(S) <= m of |E(S,~S)| / vol(S).
inline MinConductanceResult brute_force_min_conductance(const MultiGraph &g, int cap = 20) {
  require_input(g.n() <= cap, "brute_force_min_conductance: n above cap");
  require_input(g.n() >= 2, "brute_force_min_conductance: need at least 2 vertices");
  const int n = g.n();
  const std::int64_t budget = g.m();
  MinConductanceResult best;
  bool found = false;
  std::vector<char> mask(n, 0);
  for (std::uint32_t bits = 1; bits + 1 < (1u << n); ++bits) {
    std::int64_t vol = 0;
    for (int v = 0; v < n; ++v) {
      mask[v] = (bits >> v) & 1u;
      if (mask[v]) vol += g.degree(v);
    }
    if (vol == 0 || vol > budget) continue;
    std::int64_t cross = crossing_edges(g, mask);
    // compare cross/vol < best.crossing/best.vol exactly
    if (!found || cross * best.vol < best.crossing * vol) {
      found = true;
      best.crossing = cross;
      best.vol = vol;
      best.witness.clear();
      for (int v = 0; v < n; ++v)
        if (mask[v]) best.witness.push_back(v);
    }
  }
  require_input(found, "brute_force_min_conductance: no cut with vol(S) <= m exists");
  best.value = static_cast<double>(best.crossing) / static_cast<double>(best.vol);
  return best;
}

/// Def: A is a near phi-expander in G when every S subseteq A with
/// 2 vol(S) <= vol(A) has |E(S, V\S)| >= phi vol(S). Exhaustive.
inline bool check_near_expander(const MultiGraph &g, const std::vector<Vertex> &a, double phi,
                                int cap = 20) {
  require_input(static_cast<int>(a.size()) <= cap, "check_near_expander: |A| above cap");
  g.check_vertex_set(a);
  const int k = static_cast<int>(a.size());
  const std::int64_t vol_a = volume(g, a);
  std::vector<char> mask(g.n(), 0);
  for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
    std::fill(mask.begin(), mask.end(), 0);
    std::int64_t vol = 0;
    for (int i = 0; i < k; ++i)
      if ((bits >> i) & 1u) {
        mask[a[i]] = 1;
        vol += g.degree(a[i]);
      }
    if (2 * vol > vol_a || vol == 0) continue;
    std::int64_t cross = crossing_edges(g, mask);
    if (static_cast<double>(cross) + 1e-12 < phi * static_cast<double>(vol)) return false;
  }
  return true;
}

/// Minimum of |E(S, V'\S)| / |S| over S subseteq A with 2|S| <= |A| and no
/// split node of S adjacent to the outside. Returns nullopt when no cut
/// qualifies (the guarantee is then vacuous).
inline std::optional<double> weak_near_edge_expansion(const SubdivisionGraph &sg,
                                                      const std::vector<Vertex> &a,
                                                      int cap = 20) {
  require_input(static_cast<int>(a.size()) <= cap, "weak_near_edge_expansion: |A| above cap");
  sg.ge.check_vertex_set(a);
  const int k = static_cast<int>(a.size());
  std::optional<double> best;
  std::vector<char> mask(sg.ge.n(), 0);
  for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
    int size = 0;
    std::fill(mask.begin(), mask.end(), 0);
    for (int i = 0; i < k; ++i)
      if ((bits >> i) & 1u) {
        mask[a[i]] = 1;
        ++size;
      }
    if (2 * size > k) continue;
    bool split_boundary_free = true;
    for (int i = 0; i < k && split_boundary_free; ++i) {
      if (!((bits >> i) & 1u) || !sg.is_split(a[i])) continue;
      for (auto [u, e] : sg.ge.incident(a[i])) {
        (void)e;
        if (!mask[u]) {
          split_boundary_free = false;
          break;
        }
      }
    }
    if (!split_boundary_free) continue;
    double ratio = static_cast<double>(crossing_edges(sg.ge, mask)) / size;
    if (!best || ratio < *best) best = ratio;
  }
  return best;
}

inline bool check_weak_near_edge_expander(const SubdivisionGraph &sg, const std::vector<Vertex> &a,
                                          double phi, int cap = 20) {
  auto value = weak_near_edge_expansion(sg, a, cap);
  return !value || *value + 1e-12 >= phi;
}

/// Strong near (theta, phi)-edge-expander, unweighted: every S subseteq A
/// with |S| * theta_den <= theta_num * |A| has |E(S, V\S)| >= phi |S|.
inline bool check_strong_near_edge_expander(const MultiGraph &g, const std::vector<Vertex> &a,
                                            long long theta_num, long long theta_den, double phi,
                                            int cap = 20) {
  require_input(static_cast<int>(a.size()) <= cap, "check_strong_near_edge_expander: cap");
  g.check_vertex_set(a);
  const int k = static_cast<int>(a.size());
  std::vector<char> mask(g.n(), 0);
  for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
    int size = 0;
    std::fill(mask.begin(), mask.end(), 0);
    for (int i = 0; i < k; ++i)
      if ((bits >> i) & 1u) {
        mask[a[i]] = 1;
        ++size;
      }
    if (static_cast<long long>(size) * theta_den > theta_num * k) continue;
    std::int64_t cross = crossing_edges(g, mask);
    if (static_cast<double>(cross) + 1e-12 < phi * size) return false;
  }
  return true;
}

/// If the top singular value of Delta F Delta is at most 1/100, verify by
/// enumeration that the active set is a strong near (6/7, 1/100)
/// edge-expander in the weighted graph F: every S with 7|S| <= 6k has
/// sum_{u in S, v notin S} F(u,v) >= |S|/100. Vacuously true when the
/// singular-value hypothesis fails.
inline bool check_expansion_estimate(const Eigen::MatrixXd &f, const std::vector<int> &active,
                                     int cap = 14) {
  const int k = static_cast<int>(active.size());
  require_input(k <= cap, "check_expansion_estimate: |active| above cap");
  if (k == 0) return true;
  const double top = top_singular_value(f, active);
  if (top > 1.0 / 100.0) return true;

  const int m = static_cast<int>(f.rows());
  std::vector<char> in_s(m, 0);
  for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
    int size = 0;
    std::fill(in_s.begin(), in_s.end(), 0);
    for (int i = 0; i < k; ++i)
      if ((bits >> i) & 1u) {
        in_s[active[i]] = 1;
        ++size;
      }
    if (7LL * size > 6LL * k) continue;
    double out_mass = 0.0;
    for (int u = 0; u < m; ++u) {
      if (!in_s[u]) continue;
      for (int v = 0; v < m; ++v)
        if (!in_s[v]) out_mass += f(u, v);
    }
    if (out_mass + 1e-9 < static_cast<double>(size) / 100.0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Congestion accounting.
// ---------------------------------------------------------------------------

struct CongestionReport {
  bool ok = true;
  long long max_flow = 0;
  double mean_flow = 0.0;
  long long budget = 0;
};

/// Per-edge cumulative routed flow after t rounds must stay within c*t.
inline CongestionReport congestion_audit(const std::vector<long long> &ledger, long long t,
                                         long long c) {
  CongestionReport rep;
  rep.budget = c * t;
  long long sum = 0;
  for (long long f : ledger) {
    rep.max_flow = std::max(rep.max_flow, f);
    sum += f;
    if (f > rep.budget) rep.ok = false;
  }
  rep.mean_flow = ledger.empty() ? 0.0 : static_cast<double>(sum) / ledger.size();
  return rep;
}

/// One game round as the embedding audit needs it: the matching and, for
/// every pair, the unit-flow path (G_E edge ids) that realized it.
struct RoutedRound {
  MatchingRound matching;
  std::vector<std::vector<EdgeId>> paths; // parallel to matching.pairs
};

/// Explicitly builds the multicommodity routing that embeds F_t in the union
/// of matchings with congestion 2/d, composes it with the unit-flow paths,
/// and returns the worst congestion any G_E edge sees. Checks that the
/// constructed routing really delivers F_t. Oracle scale only.
inline double flow_matrix_embedding_congestion(const std::vector<RoutedRound> &rounds, int m,
                                               int d, int ge_edge_count, int cap = 16) {
  require_oracle_cap(m, cap);
  struct GtEdge {
    int a, b;
    int round;
    int pair_index;
    std::vector<double> fwd, bwd; // per-commodity flow a->b and b->a
  };
  std::vector<GtEdge> edges;
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(m, m);

  for (int t = 0; t < static_cast<int>(rounds.size()); ++t) {
    const auto &round = rounds[t].matching;
    round.validate(m);
    std::vector<int> partner(m, -1);
    for (auto [a, b] : round.pairs) {
      partner[a] = b;
      partner[b] = a;
    }
    const double lazy = static_cast<double>(d - 1) / d;
    const double hop = 1.0 / d;

    // Left multiplication by N: re-mix existing edge flows by source pair,
    // and ship 1/d of each matched commodity across its matching edge.
    for (auto &e : edges) {
      std::vector<double> fwd = e.fwd, bwd = e.bwd;
      for (int x = 0; x < m; ++x) {
        if (partner[x] < 0) continue;
        int y = partner[x];
        fwd[x] = lazy * e.fwd[x] + hop * e.fwd[y];
        bwd[x] = lazy * e.bwd[x] + hop * e.bwd[y];
      }
      e.fwd.swap(fwd);
      e.bwd.swap(bwd);
    }
    Eigen::MatrixXd n_mat = dense_lazy_matching(round, m, d);
    Eigen::MatrixXd nf = n_mat * f;

    for (int p = 0; p < static_cast<int>(round.pairs.size()); ++p) {
      auto [a, b] = round.pairs[p];
      GtEdge e;
      e.a = a;
      e.b = b;
      e.round = t;
      e.pair_index = p;
      e.fwd.assign(m, 0.0);
      e.bwd.assign(m, 0.0);
      e.fwd[a] = hop; // commodity a crosses, then disperses as b's flow did
      e.bwd[b] = hop;
      // Right multiplication by N: each endpoint forwards 1/d of everything
      // it received (per NF) to its partner.
      for (int x = 0; x < m; ++x) {
        e.fwd[x] += nf(x, a) * hop;
        e.bwd[x] += nf(x, b) * hop;
      }
      edges.push_back(std::move(e));
    }
    f = nf * n_mat;
  }

  // The routing must deliver F_t: commodity x reaches w in amount F(x,w).
  Eigen::MatrixXd delivered = Eigen::MatrixXd::Zero(m, m);
  for (int x = 0; x < m; ++x) delivered(x, x) = 1.0;
  for (const auto &e : edges)
    for (int x = 0; x < m; ++x) {
      delivered(x, e.b) += e.fwd[x];
      delivered(x, e.a) += e.bwd[x];
      delivered(x, e.a) -= e.fwd[x];
      delivered(x, e.b) -= e.bwd[x];
    }
  require_internal((delivered - f).cwiseAbs().maxCoeff() < 1e-9,
                   "flow matrix embedding does not deliver F_t");

  // Compose with the per-pair unit-flow paths in G_E.
  std::vector<double> ge_load(ge_edge_count, 0.0);
  for (const auto &e : edges) {
    double total = std::accumulate(e.fwd.begin(), e.fwd.end(), 0.0) +
                   std::accumulate(e.bwd.begin(), e.bwd.end(), 0.0);
    const auto &path = rounds[e.round].paths[e.pair_index];
    for (EdgeId id : path) ge_load[id] += total;
  }
  double worst = 0.0;
  for (double load : ge_load) worst = std::max(worst, load);
  return worst;
}

// ---------------------------------------------------------------------------
// Spectral lower bound used for cluster certification.
// ---------------------------------------------------------------------------

/// Second-smallest eigenvalue of the normalized Laplacian
/// I - D^{-1/2} A D^{-1/2}; self-loops contribute 1 to both the degree and
/// the diagonal of A, matching the degree convention. lambda_2 / 2 is a
/// sound lower bound on the conductance of a connected graph.
inline double normalized_laplacian_lambda2(const MultiGraph &g, int cap = 400) {
  require_input(g.n() >= 2, "normalized_laplacian_lambda2: need >= 2 vertices");
  require_input(g.n() <= cap, "normalized_laplacian_lambda2: n above cap");
  const int n = g.n();
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (const auto &[u, v] : g.edges()) {
    if (u == v)
      adj(u, u) += 1.0;
    else {
      adj(u, v) += 1.0;
      adj(v, u) += 1.0;
    }
  }
  Eigen::VectorXd inv_sqrt_deg(n);
  for (int v = 0; v < n; ++v) {
    require_input(g.degree(v) > 0, "normalized_laplacian_lambda2: isolated vertex");
    inv_sqrt_deg(v) = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n) -
                        inv_sqrt_deg.asDiagonal() * adj * inv_sqrt_deg.asDiagonal();
  lap = 0.5 * (lap + lap.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  require_internal(es.info() == Eigen::Success, "eigensolve failed");
  return es.eigenvalues()(1);
}

} // namespace expdec
