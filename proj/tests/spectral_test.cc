#include "expdec/spectral.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "expdec/oracles.hpp"
#include "expdec/prng.hpp"
#include "test_util.hpp"

namespace expdec {
namespace {

TEST(SampleUnitVector, DimOneAndNormalization) {
  Rng rng(1);
  auto r1 = sample_unit_vector(1, rng);
  EXPECT_NEAR(std::abs(r1[0]), 1.0, 1e-12);
  for (int rep = 0; rep < 10; ++rep) {
    auto r = sample_unit_vector(37, rng);
    double norm = 0;
    for (double x : r) norm += x * x;
    EXPECT_NEAR(norm, 1.0, 1e-12);
  }
  EXPECT_THROW(sample_unit_vector(0, rng), InputError);
}

TEST(SampleUnitVector, CoordinateSecondMoment) {
  // E[r_i^2] = 1/m within three standard errors at 10^4 samples.
  const int m = 16;
  const int samples = 10000;
  Rng rng(42);
  double sum0 = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto r = sample_unit_vector(m, rng);
    sum0 += r[0] * r[0];
  }
  const double mean = sum0 / samples;
  const double se = std::sqrt(2.0) / (m * std::sqrt(static_cast<double>(samples)));
  EXPECT_NEAR(mean, 1.0 / m, 3 * se);
}

TEST(ApplyLazyMatching, MatchesDenseOperator) {
  MatchingRound empty;
  std::vector<double> x{1.0, -2.0, 0.5};
  EXPECT_EQ(apply_lazy_matching(empty, x, 4), x);

  MatchingRound pair01{{{0, 1}}, 1};
  std::vector<double> e0{1.0, 0.0, 0.0};
  auto avg = apply_lazy_matching(pair01, e0, 2);
  EXPECT_DOUBLE_EQ(avg[0], 0.5);
  EXPECT_DOUBLE_EQ(avg[1], 0.5);
  EXPECT_DOUBLE_EQ(avg[2], 0.0);

  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 6 + rng.below_int(10);
    auto hist = testutil::random_history(m, 1, rng);
    const auto &round = hist.matchings[0];
    std::vector<double> v(m);
    for (double &t : v) t = rng.gaussian();
    auto fast = apply_lazy_matching(round, v, 8);
    Eigen::MatrixXd n_mat = dense_lazy_matching(round, m, 8);
    Eigen::VectorXd vv = Eigen::Map<Eigen::VectorXd>(v.data(), m);
    Eigen::VectorXd dense = n_mat * vv;
    for (int i = 0; i < m; ++i) EXPECT_NEAR(fast[i], dense(i), 1e-12);
  }
}

TEST(ApplyCentering, AnnihilatesConstantsAndIsIdempotent) {
  std::vector<int> active{0, 2, 3};
  std::vector<double> constant{2.0, 9.0, 2.0, 2.0};
  auto zero = apply_centering(active, constant);
  for (int i : active) EXPECT_NEAR(zero[i], 0.0, 1e-15);
  EXPECT_EQ(zero[1], 0.0);

  Rng rng(6);
  std::vector<double> x(7);
  for (double &t : x) t = rng.gaussian();
  std::vector<int> act{1, 2, 4, 6};
  auto once = apply_centering(act, x);
  auto twice = apply_centering(act, once);
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(once[i], twice[i], 1e-14);

  EXPECT_THROW(apply_centering(std::vector<int>{}, x), InputError);
}

TEST(ProjectPower, TrivialCases) {
  Rng rng(9);
  const int m = 12;
  std::vector<int> active(m);
  for (int i = 0; i < m; ++i) active[i] = i;
  auto r = sample_unit_vector(m, rng);

  // No matchings: W_0 = Delta^d = Delta by idempotence.
  auto proj = project_power({}, active, r, 4);
  auto expected = apply_centering(active, r);
  for (int i = 0; i < m; ++i) EXPECT_NEAR(proj.u[i], expected[i], 1e-12);

  // Constant direction is annihilated.
  std::vector<double> ones(m, 1.0 / std::sqrt(static_cast<double>(m)));
  auto zero = project_power({}, active, ones, 4);
  for (int i = 0; i < m; ++i) EXPECT_NEAR(zero.u[i], 0.0, 1e-12);
}

TEST(ProjectPower, MatchesDensePower) {
  Rng rng(17);
  for (int rep = 0; rep < 15; ++rep) {
    const int m = 8 + rng.below_int(25);
    const int rounds = 1 + rng.below_int(4);
    auto hist = testutil::random_history(m, rounds, rng);
    const auto &active = hist.active_by_round.back();
    const int d = 8;
    auto r = sample_unit_vector(m, rng);

    auto proj = project_power(hist.matchings, active, r, d);

    Eigen::MatrixXd f = dense_flow_matrix(hist.matchings, m, d);
    auto [w, psi] = dense_W_and_potential(f, active, d);
    (void)psi;
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r.data(), m);
    Eigen::VectorXd dense = w * rv;
    for (int i = 0; i < m; ++i) EXPECT_NEAR(proj.u[i], dense(i), 1e-8);
  }
}

TEST(ProjectPower, LinearityAndZeroSum) {
  Rng rng(23);
  const int m = 20;
  auto hist = testutil::random_history(m, 3, rng);
  const auto &active = hist.active_by_round.back();
  auto r1 = sample_unit_vector(m, rng);
  auto r2 = sample_unit_vector(m, rng);
  const double a = 0.7, b = -1.3;
  std::vector<double> combo(m);
  for (int i = 0; i < m; ++i) combo[i] = a * r1[i] + b * r2[i];

  auto p1 = project_power(hist.matchings, active, r1, 8);
  auto p2 = project_power(hist.matchings, active, r2, 8);
  auto pc = project_power(hist.matchings, active, combo, 8);
  for (int i = 0; i < m; ++i) EXPECT_NEAR(pc.u[i], a * p1.u[i] + b * p2.u[i], 1e-9);

  EXPECT_NEAR(projection_sum(p1), 0.0, 1e-9 * m);
  EXPECT_NEAR(projection_sum(pc), 0.0, 1e-9 * m);
}

// Gaussian projection statistics: for fixed rows v_i of a dense W,
// E[u_i^2] = ||v_i||^2 / m and E[(u_i-u_j)^2] = ||v_i-v_j||^2 / m,
// Monte-Carlo estimated within 5% at 10^4 samples.
TEST(ProjectionStatistics, SecondMoments) {
  Rng rng(31);
  const int m = 10;
  auto hist = testutil::random_history(m, 2, rng);
  const auto &active = hist.active_by_round.back();
  Eigen::MatrixXd f = dense_flow_matrix(hist.matchings, m, 4);
  auto [w, psi] = dense_W_and_potential(f, active, 4);
  (void)psi;

  const int i = active[0], j = active[1];
  const double norm_i = w.row(i).squaredNorm();
  const double norm_ij = (w.row(i) - w.row(j)).squaredNorm();

  const int samples = 10000;
  double sum_ui = 0.0, sum_dij = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto r = sample_unit_vector(m, rng);
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r.data(), m);
    const double ui = w.row(i).dot(rv);
    const double uj = w.row(j).dot(rv);
    sum_ui += ui * ui;
    sum_dij += (ui - uj) * (ui - uj);
  }
  EXPECT_NEAR(sum_ui / samples, norm_i / m, 0.05 * norm_i / m);
  EXPECT_NEAR(sum_dij / samples, norm_ij / m, 0.05 * norm_ij / m);
}

// High-probability clause: fit the constant on one run, check the quantile
// on a fresh one.
TEST(ProjectionStatistics, TailQuantile) {
  Rng fit_rng(77);
  const int m = 12;
  auto hist = testutil::random_history(m, 2, fit_rng);
  const auto &active = hist.active_by_round.back();
  Eigen::MatrixXd f = dense_flow_matrix(hist.matchings, m, 4);
  auto [w, psi] = dense_W_and_potential(f, active, 4);
  (void)psi;
  const int i = active[0];
  const double norm_i = w.row(i).squaredNorm();
  const double logm = std::log2(static_cast<double>(m));

  auto quantile_alpha = [&](Rng &rng, int samples) {
    std::vector<double> vals;
    vals.reserve(samples);
    for (int s = 0; s < samples; ++s) {
      auto r = sample_unit_vector(m, rng);
      Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r.data(), m);
      const double ui = w.row(i).dot(rv);
      vals.push_back(ui * ui * m / (logm * norm_i));
    }
    std::sort(vals.begin(), vals.end());
    return vals[static_cast<std::size_t>(0.995 * samples)];
  };
  const double alpha_hat = quantile_alpha(fit_rng, 10000);

  Rng test_rng(78);
  int below = 0;
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) {
    auto r = sample_unit_vector(m, test_rng);
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r.data(), m);
    const double ui = w.row(i).dot(rv);
    if (ui * ui <= alpha_hat * logm / m * norm_i) ++below;
  }
  EXPECT_GE(below, static_cast<int>(0.99 * samples));
}

} // namespace
} // namespace expdec
