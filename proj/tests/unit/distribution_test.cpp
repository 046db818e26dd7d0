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

#include "momentforge/distribution.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "momentforge/random.hpp"
#include "oracles.hpp"

namespace momentforge {
namespace {

DiscreteDistribution random_distribution(SplitMix64& rng, int size) {
  Eigen::VectorXd x(size), w(size);
  for (int i = 0; i < size; ++i) {
    x(i) = 2.0 * rng.uniform() - 1.0;
    w(i) = rng.uniform();
  }
  return DiscreteDistribution::on_line(x, w / w.sum());
}

TEST(DiscreteDistribution, ValidatesInput) {
  Eigen::VectorXd x(2), w(2);
  x << -0.5, 0.5;
  w << 0.5, 0.5;
  EXPECT_NO_THROW(DiscreteDistribution::on_line(x, w));
  w << 0.6, 0.6;
  EXPECT_THROW(DiscreteDistribution::on_line(x, w), std::invalid_argument);
  w << 1.5, -0.5;
  EXPECT_THROW(DiscreteDistribution::on_line(x, w), std::invalid_argument);
  w << 0.5, 0.5;
  x << -0.5, 1.1;
  EXPECT_THROW(DiscreteDistribution::on_line(x, w), std::domain_error);
  x << -0.5, 1.0 + 1e-13;
  EXPECT_EQ(DiscreteDistribution::on_line(x, w).points()(1), 1.0);
}

TEST(DiscreteDistribution, PruneAndConsolidate) {
  Eigen::VectorXd x(4), w(4);
  x << 0.5, -0.2, 0.5, 0.1;
  w << 0.3, 0.4, 0.3 - 1e-16, 1e-16;
  const auto p = DiscreteDistribution::on_line(x, w / w.sum());
  EXPECT_EQ(p.pruned().size(), 3);
  const auto c = p.pruned().consolidated();
  ASSERT_EQ(c.size(), 2);
  EXPECT_EQ(c.points()(0), -0.2);
  EXPECT_NEAR(c.weights()(1), 0.6, 1e-15);
}

TEST(ChebMoments, HandValues) {
  const auto half = cheb_moments(DiscreteDistribution::point_mass(0.5), 3, ChebBasis::kPlain);
  EXPECT_DOUBLE_EQ(half[1], 0.5);
  EXPECT_DOUBLE_EQ(half[2], -0.5);
  EXPECT_DOUBLE_EQ(half[3], -1.0);

  Eigen::MatrixXd ends(2, 1);
  ends << -1.0, 1.0;
  const auto sym = cheb_moments(DiscreteDistribution::uniform(ends), 7, ChebBasis::kPlain);
  for (int j = 1; j <= 7; ++j) EXPECT_EQ(sym[j], j % 2 ? 0.0 : 1.0);

  const auto zero = cheb_moments(DiscreteDistribution::point_mass(0.0), 4, ChebBasis::kPlain);
  EXPECT_EQ(zero.values, (Eigen::Vector4d(0, -1, 0, 1)));
}

TEST(ChebMoments, PointMassIsExactTAndNormalizedScales) {
  for (double x0 : {-0.91, -0.3, 0.0, 0.44, 1.0}) {
    const auto m = cheb_moments(DiscreteDistribution::point_mass(x0), 25, ChebBasis::kPlain);
    const auto mn = cheb_moments(DiscreteDistribution::point_mass(x0), 25, ChebBasis::kNormalized);
    for (int j = 1; j <= 25; ++j) {
      EXPECT_EQ(m[j], chebyshev_t(j, x0));
      EXPECT_NEAR(mn[j], std::sqrt(2.0 / std::numbers::pi) * m[j], 1e-15);
      EXPECT_LE(std::abs(mn[j]), std::sqrt(2.0 / std::numbers::pi) + 1e-15);
    }
    EXPECT_NEAR((mn.in_basis(ChebBasis::kPlain).values - m.values).norm(), 0.0, 1e-14);
  }
}

TEST(ChebMomentsMulti, HandValues) {
  Eigen::MatrixXd one(1, 2);
  one << 1.0, 1.0;
  auto at = [](const MultiMoments& mm, MultiIndex k) {
    for (std::size_t i = 0; i < mm.indices.size(); ++i)
      if (mm.indices[i] == k) return mm.values(i);
    ADD_FAILURE() << "missing index";
    return std::nan("");
  };
  EXPECT_EQ(at(cheb_moments_multi(DiscreteDistribution::uniform(one), 2, ChebBasis::kPlain), {2, 2}), 1.0);
  Eigen::MatrixXd pair(2, 2);
  pair << -1, -1, 1, 1;
  EXPECT_EQ(at(cheb_moments_multi(DiscreteDistribution::uniform(pair), 2, ChebBasis::kPlain), {1, 0}), 0.0);
  Eigen::MatrixXd half(1, 2);
  half << 0.5, 0.0;
  const auto mm = cheb_moments_multi(DiscreteDistribution::uniform(half), 2, ChebBasis::kPlain);
  EXPECT_DOUBLE_EQ(at(mm, {1, 2}), -0.5);
  const auto mn = cheb_moments_multi(DiscreteDistribution::uniform(half), 2, ChebBasis::kNormalized);
  EXPECT_NEAR(at(mn, {1, 2}), -0.5 * 2.0 / std::numbers::pi, 1e-15);
  EXPECT_THROW(cheb_moments_multi(DiscreteDistribution::point_mass(0.1), 2, ChebBasis::kPlain),
               std::invalid_argument);
}

TEST(W1Distance, HandValues) {
  EXPECT_DOUBLE_EQ(w1_distance(DiscreteDistribution::point_mass(-1), DiscreteDistribution::point_mass(1)), 2.0);
  Eigen::MatrixXd pts(2, 1);
  pts << -0.5, 0.5;
  EXPECT_DOUBLE_EQ(w1_distance(DiscreteDistribution::point_mass(0), DiscreteDistribution::uniform(pts)), 0.5);
}

TEST(W1Distance, MatchesTransportLp) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_distribution(rng, 1 + static_cast<int>(rng.next() % 6));
    const auto q = random_distribution(rng, 1 + static_cast<int>(rng.next() % 6));
    const double lp = oracle::transport_w1(p.points(), p.weights(), q.points(), q.weights());
    EXPECT_NEAR(w1_distance(p, q), lp, 1e-8);
  }
}

TEST(W1Distance, IsAMetric) {
  SplitMix64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_distribution(rng, 5), q = random_distribution(rng, 4), r = random_distribution(rng, 3);
    EXPECT_EQ(w1_distance(p, q), w1_distance(q, p));
    EXPECT_LE(w1_distance(p, r), w1_distance(p, q) + w1_distance(q, r) + 1e-9);
    EXPECT_NEAR(w1_distance(p, p), 0.0, 1e-15);
  }
  Eigen::MatrixXd two(1, 2);
  two << 0.1, 0.2;
  EXPECT_THROW(w1_distance(DiscreteDistribution::uniform(two), DiscreteDistribution::point_mass(0)),
               std::invalid_argument);
}

TEST(MomentErrorGamma, HandValues) {
  MomentVector a{Eigen::Vector3d(0.1, 0.2, 0.3)}, b = a;
  auto r = moment_error_gamma(a, b);
  EXPECT_EQ(r.gamma, 0.0);
  EXPECT_DOUBLE_EQ(r.w1_bound, 12.0);
  EXPECT_DOUBLE_EQ(r.w1_bound_conjectured, 2 * std::numbers::pi / 3);
  b.values.array() += 0.3;
  EXPECT_NEAR(moment_error_gamma(a, b).gamma, 0.3 * std::sqrt(1 + 0.25 + 1.0 / 9), 1e-15);
  MomentVector c{Eigen::VectorXd::Constant(1, 0.0)}, d{Eigen::VectorXd::Constant(1, 0.1)};
  EXPECT_NEAR(moment_error_gamma(c, d).gamma, 0.1, 1e-15);
  d.basis = ChebBasis::kNormalized;
  EXPECT_THROW(moment_error_gamma(c, d), std::invalid_argument);
}

TEST(MomentErrorGamma, SufficientConditionImpliesBound) {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng.next() % 64);
    const double big_gamma = rng.uniform();
    MomentVector a{Eigen::VectorXd::Zero(k)}, b{Eigen::VectorXd(k)};
    for (int j = 1; j <= k; ++j) {
      const double cap = big_gamma * std::sqrt(j / (1.0 + std::log(static_cast<double>(k))));
      b.values(j - 1) = (2.0 * rng.uniform() - 1.0) * cap;
    }
    EXPECT_LE(moment_error_gamma(a, b).gamma, big_gamma + 1e-12);
  }
}

TEST(Grid, UniformAndRounding) {
  const Grid g = Grid::uniform(2);
  ASSERT_EQ(g.axis_size(), 5);
  Eigen::VectorXd pts(4);
  pts << 0.26, 0.5, 0.25, -0.75;
  const Eigen::VectorXd r = round_to_grid(pts, g);
  EXPECT_EQ(r(0), 0.5);
  EXPECT_EQ(r(1), 0.5);
  EXPECT_EQ(r(2), 0.0);
  EXPECT_EQ(r(3), -1.0);
  EXPECT_THROW(round_to_grid(pts, Grid{}), std::invalid_argument);
  EXPECT_THROW(round_to_grid(pts, Grid::chebyshev(4)), std::invalid_argument);

  SplitMix64 rng(24);
  const Grid fine = Grid::uniform(37);
  Eigen::VectorXd many(10000);
  for (auto& v : many) v = 2.0 * rng.uniform() - 1.0;
  EXPECT_LE((round_to_grid(many, fine) - many).cwiseAbs().maxCoeff(), 0.5 / 37 + 1e-15);
}

TEST(Grid, RoundingErrorInW1) {
  SplitMix64 rng(25);
  for (long n : {10L, 100L, 1000L}) {
    const double eps = 0.5;
    const int cells = static_cast<int>(std::ceil(eps * n));
    Eigen::MatrixXd x(n, 1);
    for (long i = 0; i < n; ++i) x(i, 0) = 2.0 * rng.uniform() - 1.0;
    const Eigen::MatrixXd xr = round_to_grid(x.col(0), Grid::uniform(cells));
    EXPECT_LE(w1_distance(DiscreteDistribution::uniform(x), DiscreteDistribution::uniform(xr)),
              1.0 / (2.0 * cells) + 1e-15);
  }
}

TEST(Grid, TensorMaterializeLastAxisFastest) {
  const Grid g = Grid::tensor_uniform(1, 2);
  const Eigen::MatrixXd pts = g.materialize();
  ASSERT_EQ(pts.rows(), 9);
  EXPECT_EQ(pts.row(0), Eigen::RowVector2d(-1, -1));
  EXPECT_EQ(pts.row(1), Eigen::RowVector2d(-1, 0));
  EXPECT_EQ(pts.row(3), Eigen::RowVector2d(0, -1));
}

TEST(ArccosRound, ExamplesAndBound) {
  const Grid g2 = Grid::chebyshev(2);
  EXPECT_NEAR(arccos_round(1.0, g2), std::cos(std::numbers::pi / 4), 1e-15);
  EXPECT_EQ(arccos_round_index(0.0, g2), 0);
  const Grid g = Grid::chebyshev(13);
  for (Eigen::Index i = 0; i < g.axis_size(); ++i) EXPECT_EQ(arccos_round_index(g.points(i), g), i);
  SplitMix64 rng(26);
  for (int t = 0; t < 10000; ++t) {
    const double x = 2.0 * rng.uniform() - 1.0;
    const double y = arccos_round(x, g);
    EXPECT_LE(std::abs(std::acos(x) - std::acos(y)), std::numbers::pi / 26 + 1e-12);
  }
}

}  // namespace
}  // namespace momentforge
