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

#include "momentforge/sde.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "momentforge/random.hpp"
#include "oracles.hpp"

namespace momentforge {
namespace {

// Uniform on the entries of x, which may leave [-1, 1].
DiscreteDistribution uniform_on(const Eigen::VectorXd& x) {
  const double s = std::max(1.0, x.cwiseAbs().maxCoeff());
  return DiscreteDistribution::uniform(Eigen::MatrixXd(x / s)).affine(s, 0.0);
}

Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed) {
  NormalStream normal(seed);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = normal.next() / std::sqrt(double(n));
  return a;
}

TEST(LinearOperator, LinearSymmetricAndCounted) {
  const Eigen::MatrixXd a = random_symmetric(20, 1);
  const DenseOperator dense(a);
  const SparseOperator sparse(Eigen::SparseMatrix<double>(a.sparseView()));
  SplitMix64 rng(2);
  Eigen::VectorXd x(20), y(20), ax, ay, axy, sx;
  for (int i = 0; i < 20; ++i) x(i) = rng.uniform(), y(i) = rng.uniform();
  dense.apply(x, ax);
  dense.apply(y, ay);
  dense.apply(x + 3.0 * y, axy);
  EXPECT_LE((axy - ax - 3.0 * ay).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(ax.dot(y), x.dot(ay), 1e-8);
  sparse.apply(x, sx);
  EXPECT_LE((sx - ax).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(dense.matvec_count(), 3);
  EXPECT_THROW(dense.apply(Eigen::VectorXd::Zero(3), ax), std::invalid_argument);
}

TEST(LinearOperator, CounterIsExactUnderConcurrency) {
  const DiagonalOperator op(Eigen::VectorXd::Ones(16));
  ASSERT_TRUE(op.concurrent_safe());
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&] {
      Eigen::VectorXd x = Eigen::VectorXd::Ones(16), y;
      for (int i = 0; i < 1000; ++i) op.apply(x, y);
    });
  for (auto& th : pool) th.join();
  EXPECT_EQ(op.matvec_count(), 4000);
}

TEST(PowerMethod, Examples) {
  const DiagonalOperator identity(Eigen::VectorXd::Ones(8));
  const NormBound b = power_method_bound(identity, 10, 3);
  EXPECT_GE(b.S, 1.0);
  EXPECT_LE(b.S, 2.0);
  const DiagonalOperator d31(Eigen::Vector2d(3.0, 1.0));
  const NormBound b31 = power_method_bound(d31, 60, 4);
  EXPECT_GE(b31.S, 3.0);
  EXPECT_LE(b31.S, 6.0);
  EXPECT_THROW(power_method_bound(identity, 0, 1), std::invalid_argument);
}

TEST(PowerMethod, IndefiniteSpectrumStillBounded) {
  // Rayleigh quotients of diag(1, -1) can vanish; the bound must not.
  const DiagonalOperator op(Eigen::Vector2d(1.0, -1.0));
  const NormBound b = power_method_bound(op, 5, 9);
  EXPECT_GE(b.S, 1.0);
  EXPECT_LE(b.S, 2.0);
}

TEST(PowerMethod, HomogeneousAndZero) {
  const Eigen::MatrixXd a = random_symmetric(30, 5);
  const DenseOperator op(a), op2(2.0 * a);
  EXPECT_EQ(power_method_bound(op2, 20, 6).S, 2.0 * power_method_bound(op, 20, 6).S);
  const NormBound z = power_method_bound(DiagonalOperator(Eigen::VectorXd::Zero(5)), 5, 1);
  EXPECT_TRUE(z.zero_operator);
  EXPECT_EQ(z.S, 1e-30);
}

TEST(SdeConfig, DerivedQuantities) {
  SdeConfig cfg;
  cfg.epsilon = 0.1;
  EXPECT_EQ(cfg.k(), 800);
  EXPECT_DOUBLE_EQ(cfg.gamma(), 1.0 / (800.0 * std::sqrt(1.0 + std::log(800.0))));
  EXPECT_DOUBLE_EQ(cfg.alpha(), cfg.delta / 800.0);
  cfg.epsilon = 0.3;
  EXPECT_EQ(cfg.k(), 267);
  cfg.epsilon = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ProbeSchedule, FormulaAndAccounting) {
  const auto s = probe_schedule(100, 10, 16.0, 0.01, 0.05);
  for (int j = 1; j <= 10; ++j) {
    const double v = 1.0 + 16.0 * std::pow(std::log(100.0), 2) / (100.0 * j * 0.0025);
    EXPECT_EQ(s[j - 1], static_cast<long>(std::ceil(v)));
    if (j > 1) EXPECT_LE(s[j - 1], s[j - 2]);
  }
  long sum = 0;
  for (long l : s) sum += l;
  EXPECT_EQ(planned_matvecs(s), sum);
}

TEST(Hutchinson, IdentityAndSignDiagonalAreExact) {
  const DiagonalOperator identity(Eigen::VectorXd::Ones(10));
  const std::vector<long> schedule = {5, 4, 4, 2, 1, 1};
  const auto r = hutchinson_cheb_moments(identity, 6, schedule, 1);
  for (int j = 1; j <= 6; ++j) EXPECT_EQ(r.moments[j], 1.0);
  EXPECT_EQ(r.matvecs, planned_matvecs(schedule));

  const DiagonalOperator signs(Eigen::Vector2d(1.0, -1.0));
  const auto s = hutchinson_cheb_moments(signs, 8, std::vector<long>(8, 3), 2);
  for (int j = 2; j <= 8; j += 2) EXPECT_EQ(s.moments[j], 1.0);
}

TEST(Hutchinson, UnitScheduleCostsKProducts) {
  const DiagonalOperator op(Eigen::VectorXd::LinSpaced(12, -0.9, 0.9));
  const auto r = hutchinson_cheb_moments(op, 7, std::vector<long>(7, 1), 3);
  EXPECT_EQ(r.matvecs, 7);
  EXPECT_EQ(op.matvec_count(), 7);
  EXPECT_THROW(hutchinson_cheb_moments(op, 3, {1, 2, 1}, 0), std::invalid_argument);
}

TEST(Hutchinson, UnbiasedOnSmallDenseMatrices) {
  for (std::uint64_t m = 0; m < 3; ++m) {
    Eigen::MatrixXd a = random_symmetric(8, 100 + m);
    a /= Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().cwiseAbs().maxCoeff();
    const Eigen::VectorXd lambda = oracle::bisection_eigenvalues(a);
    const DenseOperator op(a);
    const int k = 4, probes = 100000;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(k), sum_sq = Eigen::VectorXd::Zero(k);
    for (int p = 0; p < probes; ++p) {
      const auto r = hutchinson_cheb_moments(op, k, std::vector<long>(k, 1), derive_seed(m, p));
      sum += r.moments.values;
      sum_sq += r.moments.values.cwiseAbs2();
    }
    for (int j = 1; j <= k; ++j) {
      double truth = 0.0;
      for (double l : lambda) truth += chebyshev_t(j, std::clamp(l, -1.0, 1.0));
      truth /= 8.0;
      const double mean = sum(j - 1) / probes;
      const double var = sum_sq(j - 1) / probes - mean * mean;
      EXPECT_LE(std::abs(mean - truth), 3.0 * std::sqrt(var / probes) + 1e-12) << "m=" << m << " j=" << j;
    }
  }
}

TEST(EstimateSpectralDensity, ScaledIdentity) {
  const DiagonalOperator op(Eigen::VectorXd::Constant(50000, 0.7));
  SdeConfig cfg;
  cfg.epsilon = 0.5;
  cfg.c_hat = 16.0;
  cfg.seed = 4;
  const auto r = estimate_spectral_density(op, cfg);
  EXPECT_FALSE(r.report.exact_path);
  EXPECT_LE(w1_distance(r.distribution, DiscreteDistribution::point_mass(0.7)), cfg.epsilon * r.report.S);
}

TEST(EstimateSpectralDensity, HutchinsonPathOnLargeDiagonal) {
  const long n = 100000;
  Eigen::VectorXd d(n);
  SplitMix64 rng(7);
  for (auto& v : d) v = rng.uniform() < 0.3 ? -2.0 + rng.uniform() : 1.0 + rng.uniform();
  const DiagonalOperator op(d);
  SdeConfig cfg;
  cfg.epsilon = 0.5;
  cfg.c_hat = 16.0;
  cfg.delta = 0.1;
  cfg.seed = 8;
  const auto r = estimate_spectral_density(op, cfg);
  EXPECT_FALSE(r.report.exact_path);
  EXPECT_TRUE(r.report.lp_feasible);
  const int iters = static_cast<int>(std::ceil(10.0 * std::log(double(n))));
  EXPECT_EQ(r.report.matvecs, iters + r.report.planned_matvecs);
  EXPECT_EQ(op.matvec_count(), r.report.matvecs);
  EXPECT_LT(r.report.matvecs, n / 100);
  EXPECT_LE(w1_distance(r.distribution, uniform_on(d)),
            cfg.epsilon * r.report.S);
}

TEST(EstimateSpectralDensity, ExactPathWhenProbesWouldCostMore) {
  const Eigen::MatrixXd a = random_symmetric(40, 9);
  const DenseOperator op(a);
  SdeConfig cfg;
  cfg.epsilon = 0.1;
  const auto r = estimate_spectral_density(op, cfg);
  EXPECT_TRUE(r.report.exact_path);
  EXPECT_EQ(r.report.matvecs, 40);
  EXPECT_LE(w1_distance(r.distribution, exact_spectral_density(a)), 1e-10);
}

TEST(EstimateSpectralDensity, HomogeneousInTheOperator) {
  const Eigen::MatrixXd a = random_symmetric(48, 10);
  const DenseOperator op(a), op2(2.0 * a);
  SdeConfig cfg;
  cfg.epsilon = 0.5;
  cfg.c_hat = 8.0;
  cfg.allow_exact = false;
  cfg.seed = 11;
  const auto r1 = estimate_spectral_density(op, cfg);
  const auto r2 = estimate_spectral_density(op2, cfg);
  EXPECT_EQ(r2.report.S, 2.0 * r1.report.S);
  ASSERT_EQ(r1.distribution.size(), r2.distribution.size());
  EXPECT_EQ(r2.distribution.support(), 2.0 * r1.distribution.support());
  EXPECT_EQ(r2.distribution.weights(), r1.distribution.weights());
  EXPECT_LE(w1_distance(r1.distribution, exact_spectral_density(a)), cfg.epsilon * r1.report.S);
}

TEST(SdeBudget, Formula) {
  const double eps = 0.1, delta = 0.1;
  const double l1 = std::log(1.0 / eps), l2 = std::log(1.0 / (eps * delta));
  const long n = 100000;
  EXPECT_DOUBLE_EQ(sde_budget_formula(n, eps, delta), (1.0 / eps) * (1.0 + l1 * l1 * l2 * l2 / (n * eps)));
  EXPECT_EQ(sde_budget_formula(5, eps, delta), 5.0);
}

TEST(ExactSpectralDensity, Examples) {
  const auto diag = exact_spectral_density(Eigen::MatrixXd(Eigen::Vector3d(0.5, -2.0, 1.0).asDiagonal()));
  Eigen::Vector3d x(-2.0, 0.5, 1.0);
  EXPECT_NEAR(w1_distance(diag, uniform_on(x)), 0.0, 1e-14);
  Eigen::Matrix2d swap;
  swap << 0, 1, 1, 0;
  const auto s = exact_spectral_density(swap).consolidated();
  ASSERT_EQ(s.size(), 2);
  EXPECT_NEAR(s.points()(0), -1.0, 1e-14);
  EXPECT_NEAR(s.points()(1), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(s.weights()(0), 0.5);
}

TEST(JacobiEigenvalues, AgreeWithBisectionOracle) {
  const Eigen::MatrixXd a = random_symmetric(50, 12);
  Eigen::VectorXd got = jacobi_eigenvalues(a);
  std::sort(got.data(), got.data() + got.size());
  const Eigen::VectorXd want = oracle::bisection_eigenvalues(a);
  for (int idx : {0, 11, 25, 38, 49}) EXPECT_NEAR(got(idx), want(idx), 1e-9) << idx;
}

TEST(JacobiEigenvalues, RejectsBadInput) {
  Eigen::Matrix2d ns;
  ns << 0, 1, 0.5, 0;
  EXPECT_THROW(jacobi_eigenvalues(ns), std::invalid_argument);
  EXPECT_THROW(jacobi_eigenvalues(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST(MatrixMarket, SymmetricAndPattern) {
  std::istringstream sym(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 4\n1 1 2.0\n2 1 -1\n3 2 0.5\n3 3 4\n");
  const Eigen::MatrixXd a = read_matrix_market(sym);
  Eigen::Matrix3d want;
  want << 2, -1, 0, -1, 0, 0.5, 0, 0.5, 4;
  EXPECT_EQ(a, want);
  std::istringstream pat("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 1\n");
  EXPECT_EQ(Eigen::MatrixXd(read_matrix_market(pat)), (Eigen::Matrix2d() << 0, 1, 1, 0).finished());
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  std::istringstream bad("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 x 2\n");
  try {
    read_matrix_market(bad);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  std::istringstream oob("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
  EXPECT_THROW(read_matrix_market(oob), std::runtime_error);
  std::istringstream rect("%%MatrixMarket matrix coordinate real general\n2 3 0\n");
  EXPECT_THROW(read_matrix_market(rect), std::runtime_error);
}

TEST(DenseCsv, ReadsSquare) {
  std::istringstream in("1,2\n2,5\n");
  EXPECT_EQ(read_dense_csv(in), (Eigen::Matrix2d() << 1, 2, 2, 5).finished());
  std::istringstream bad("1,2\n2\n");
  EXPECT_THROW(read_dense_csv(bad), std::runtime_error);
}

}  // namespace
}  // namespace momentforge
