// Copyright 2026 The MomentForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "momentforge/recovery.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "momentforge/moment_map.hpp"
#include "momentforge/random.hpp"
#include "oracles.hpp"

namespace momentforge {
namespace {

TEST(SimplexProject, HandValues) {
  EXPECT_TRUE(simplex_project(Eigen::Vector2d(0.6, 0.6)).isApprox(Eigen::Vector2d(0.5, 0.5)));
  EXPECT_EQ(simplex_project(Eigen::Vector2d(2.0, 0.0)), Eigen::Vector2d(1.0, 0.0));
  EXPECT_THROW(simplex_project(Eigen::VectorXd()), std::invalid_argument);
  EXPECT_THROW(simplex_project(Eigen::Vector2d(NAN, 0.0)), std::invalid_argument);
}

TEST(SimplexProject, MatchesActiveSetBruteForce) {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 5);
    Eigen::VectorXd v(n);
    for (auto& x : v) x = 4.0 * rng.uniform() - 2.0;
    const Eigen::VectorXd z = simplex_project(v);
    EXPECT_GE(z.minCoeff(), 0.0);
    EXPECT_NEAR(z.sum(), 1.0, 1e-12);
    EXPECT_LE((z - oracle::simplex_projection_bruteforce(v)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ChebyshevMomentMap, AdjointAndColumnsAgree) {
  SplitMix64 rng(32);
  const ChebyshevMomentMap map(chebyshev_nodes(40), 12);
  Eigen::VectorXd z(40), y(12), az, aty;
  for (auto& v : z) v = rng.uniform();
  for (auto& v : y) v = rng.uniform() - 0.5;
  map.apply(z, az);
  map.adjoint(y, aty);
  EXPECT_NEAR(az.dot(y), z.dot(aty), 1e-12);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(40), col;
  e(7) = 1.0;
  map.apply(e, col);
  EXPECT_LE((col - map.column(7)).cwiseAbs().maxCoeff(), 1e-14);
  for (int j = 1; j <= 12; ++j) EXPECT_NEAR(col(j - 1), chebyshev_t(j, map.grid()(7)), 1e-13);
}

TEST(TensorMomentMap, MatchesMultiMomentsAndAdjoint) {
  SplitMix64 rng(33);
  for (int d : {2, 3}) {
    const Grid g = Grid::tensor_uniform(2, d);
    const TensorMomentMap map(g.points, 3, d);
    const Eigen::MatrixXd pts = g.materialize();
    Eigen::VectorXd z(pts.rows());
    for (auto& v : z) v = rng.uniform();
    z /= z.sum();
    Eigen::VectorXd az;
    map.apply(z, az);
    const auto mm = cheb_moments_multi(DiscreteDistribution(pts, z), 3, ChebBasis::kNormalized);
    ASSERT_EQ(mm.values.size(), az.size());
    EXPECT_LE((mm.values - az).cwiseAbs().maxCoeff(), 1e-13);
    Eigen::VectorXd y(az.size()), aty;
    for (auto& v : y) v = rng.uniform() - 0.5;
    map.adjoint(y, aty);
    EXPECT_NEAR(az.dot(y), z.dot(aty), 1e-12);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(z.size()), col;
    e(5) = 1.0;
    map.apply(e, col);
    EXPECT_LE((col - map.column(5)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(RecoveryConfig, GridSizes) {
  EXPECT_EQ(RecoveryConfig::for_degree(16).g, 64);
  EXPECT_EQ(RecoveryConfig::for_degree(4).g, 8);
  EXPECT_EQ(RecoveryConfig::for_spectral(16).g,
            static_cast<int>(std::ceil(64.0 * std::sqrt(1.0 + std::log(16.0)))));
  RecoveryConfig bad{5, 4, {}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = RecoveryConfig{0, 4, {}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = RecoveryConfig::for_degree(3);
  bad.solver.tolerance = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(SolveWeightedQp, PointMassAtNode) {
  for (int k : {2, 5, 9}) {
    RecoveryConfig cfg = RecoveryConfig::for_degree(k);
    const Eigen::VectorXd nodes = chebyshev_nodes(cfg.g);
    const auto m = cheb_moments(DiscreteDistribution::point_mass(nodes(1)), k, ChebBasis::kPlain);
    const QPSolution sol = solve_weighted_qp(m, cfg);
    EXPECT_LE(sol.objective, 1e-12);
    EXPECT_GE(sol.weights(1), 1.0 - 1e-6);
    EXPECT_NEAR(sol.weights.sum(), 1.0, 1e-9);
    EXPECT_GE(sol.weights.minCoeff(), 0.0);
  }
}

TEST(SolveWeightedQp, ZeroFirstMoment) {
  const QPSolution sol = solve_weighted_qp(MomentVector{Eigen::VectorXd::Zero(1)}, RecoveryConfig::for_degree(1));
  EXPECT_LE(sol.objective, 1e-12);
}

TEST(SolveWeightedQp, RejectsNormalizedMoments) {
  MomentVector m{Eigen::VectorXd::Zero(3), ChebBasis::kNormalized};
  EXPECT_THROW(solve_weighted_qp(m, RecoveryConfig::for_degree(3)), std::invalid_argument);
}

TEST(SolveWeightedQp, ObjectiveNonincreasingInIterationBudget) {
  const int k = 8;
  RecoveryConfig cfg = RecoveryConfig::for_degree(k);
  cfg.solver.polish = false;
  cfg.solver.stall_window = 1 << 30;
  Eigen::Vector3d x(-0.7, 0.1, 0.8), w(0.2, 0.5, 0.3);
  const auto m = cheb_moments(DiscreteDistribution::on_line(x, w), k, ChebBasis::kPlain);
  double prev = std::numeric_limits<double>::infinity();
  for (long it = 1; it <= 120; ++it) {
    cfg.solver.max_iters = it;
    const double f = solve_weighted_qp(m, cfg).objective;
    EXPECT_LE(f, prev + 1e-18) << "iteration " << it;
    prev = f;
  }
}

TEST(SolveWeightedQp, GridSupportedExactMomentsReachTinyObjective) {
  SplitMix64 rng(34);
  for (int trial = 0; trial < 5; ++trial) {
    const int k = 6 + trial;
    RecoveryConfig cfg = RecoveryConfig::for_degree(k);
    const Eigen::VectorXd nodes = chebyshev_nodes(cfg.g);
    Eigen::Vector3d x, w;
    for (int i = 0; i < 3; ++i) x(i) = nodes(rng.next() % cfg.g), w(i) = 0.1 + rng.uniform();
    const auto m = cheb_moments(DiscreteDistribution::on_line(x, w / w.sum()), k, ChebBasis::kPlain);
    EXPECT_LE(solve_weighted_qp(m, cfg).objective, 1e-10);
  }
}

TEST(RecoverDistribution, TwoPointAtDegree32) {
  Eigen::Vector2d x(-0.3, 0.6), w(0.5, 0.5);
  const auto p = DiscreteDistribution::on_line(x, w);
  const auto res = recover_distribution(cheb_moments(p, 32, ChebBasis::kPlain), 32);
  EXPECT_LE(w1_distance(p, res.distribution), 40.0 / 32);
  EXPECT_EQ(res.g, 182);
}

TEST(RecoverDistribution, ThreePointAtDegree16) {
  Eigen::Vector3d x(-0.81, 0.05, 0.47), w(0.3, 0.3, 0.4);
  const auto p = DiscreteDistribution::on_line(x, w);
  const auto res = recover_distribution(cheb_moments(p, 16, ChebBasis::kPlain), 16);
  const double limit = (36.0 + std::sqrt(2.0 * std::numbers::pi)) / 16.0 + 1e-6;
  EXPECT_LE(w1_distance(p, res.distribution), limit);
  EXPECT_DOUBLE_EQ(res.report.w1_bound, 36.0 / 16 + res.report.gamma);
}

TEST(RecoverDistribution, FirstMomentOneGoesToTopNode) {
  const auto res = recover_distribution(MomentVector{Eigen::VectorXd::Ones(1)}, 1);
  const Eigen::VectorXd nodes = chebyshev_nodes(1);
  EXPECT_NEAR(res.distribution.points().dot(res.distribution.weights()), nodes.maxCoeff(), 1e-6);
}

TEST(RecoverDistribution, NoisyMomentsStayWithinConstantTimesError) {
  SplitMix64 rng(35);
  NormalStream normal(36);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 16;
    Eigen::VectorXd x(4), w(4);
    for (int i = 0; i < 4; ++i) x(i) = 2.0 * rng.uniform() - 1.0, w(i) = rng.uniform();
    const auto p = DiscreteDistribution::on_line(x, w / w.sum());
    const MomentVector exact = cheb_moments(p, k, ChebBasis::kPlain);
    MomentVector noisy = exact;
    const double scale = 0.02 * rng.uniform();
    for (int j = 1; j <= k; ++j) noisy.values(j - 1) += scale * normal.next();
    const double gamma = moment_error_gamma(exact, noisy).gamma;
    const auto res = recover_distribution(noisy, k);
    EXPECT_LE(w1_distance(p, res.distribution), 40.0 * (1.0 / k + gamma));
    // Triangle inequality through the noisy target and through p rounded onto
    // the node grid, which the QP could have picked.
    const Grid nodes = Grid::chebyshev(res.g);
    Eigen::VectorXd xr(4);
    for (int i = 0; i < 4; ++i) xr(i) = arccos_round(x(i), nodes);
    const double rounding =
        moment_error_gamma(cheb_moments(DiscreteDistribution::on_line(xr, w / w.sum()), k, ChebBasis::kPlain),
                           exact)
            .gamma;
    const double back = moment_error_gamma(cheb_moments(res.distribution, k, ChebBasis::kPlain), exact).gamma;
    EXPECT_LE(back, 2.0 * gamma + rounding + 1e-6);
  }
}

TEST(SolveMomentLp, InfiniteToleranceAcceptsUniform) {
  RecoveryConfig cfg = RecoveryConfig::for_spectral(4);
  const Eigen::VectorXd tol = Eigen::VectorXd::Constant(4, std::numeric_limits<double>::infinity());
  const LpResult lp = solve_moment_lp(MomentVector{Eigen::VectorXd::Constant(4, 0.3)}, tol, cfg);
  EXPECT_TRUE(lp.feasible);
  EXPECT_EQ(lp.iterations, 0);
  EXPECT_LE((lp.weights.array() - 1.0 / cfg.g).abs().maxCoeff(), 1e-15);
}

TEST(SolveMomentLp, GridSupportedTargetIsFeasible) {
  RecoveryConfig cfg = RecoveryConfig::for_spectral(6);
  const Eigen::VectorXd nodes = chebyshev_nodes(cfg.g);
  Eigen::Vector2d x(nodes(3), nodes(20)), w(0.25, 0.75);
  const auto m = cheb_moments(DiscreteDistribution::on_line(x, w), 6, ChebBasis::kPlain);
  const LpResult lp = solve_moment_lp(m, Eigen::VectorXd::Constant(6, 1e-6), cfg);
  EXPECT_TRUE(lp.feasible);
  EXPECT_LE(lp.max_violation, 0.0);
  const auto got = cheb_moments(lp.distribution, 6, ChebBasis::kPlain);
  EXPECT_LE((got.values - m.values).cwiseAbs().maxCoeff(), 1e-6 + 1e-12);
}

TEST(SolveMomentLp, ImpossibleTargetIsFlagged) {
  RecoveryConfig cfg = RecoveryConfig::for_spectral(3);
  cfg.solver.max_iters = 2000;
  const LpResult lp = solve_moment_lp(MomentVector{Eigen::VectorXd::Constant(3, 5.0)},
                                      Eigen::VectorXd::Constant(3, 0.1), cfg);
  EXPECT_FALSE(lp.feasible);
  EXPECT_GT(lp.max_violation, 1e-9);
}

}  // namespace
}  // namespace momentforge
