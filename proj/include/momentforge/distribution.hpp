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

#ifndef MOMENTFORGE_DISTRIBUTION_HPP_
#define MOMENTFORGE_DISTRIBUTION_HPP_

#include <vector>

#include <Eigen/Dense>

#include "momentforge/chebyshev.hpp"

namespace momentforge {

// Weighted point masses on [-1, 1]^d.  Rows of `support` are points.
class DiscreteDistribution {
 public:
  static constexpr double kWeightSumTolerance = 1e-9;
  static constexpr double kPruneThreshold = 1e-15;

  DiscreteDistribution() = default;
  // Validates: weights >= 0, sum within 1e-9 of one, points inside the cube
  // up to kDomainSlack (and clamped onto it).
  DiscreteDistribution(Eigen::MatrixXd support, Eigen::VectorXd weights);

  // 1-D convenience.
  static DiscreteDistribution on_line(const Eigen::VectorXd& points,
                                      const Eigen::VectorXd& weights);
  // Renormalizes arbitrary nonnegative weights.
  static DiscreteDistribution normalized(Eigen::MatrixXd support, Eigen::VectorXd weights);
  // Uniform over the given points (duplicates allowed).
  static DiscreteDistribution uniform(Eigen::MatrixXd points);
  static DiscreteDistribution point_mass(double x);

  int dim() const { return static_cast<int>(support_.cols()); }
  Eigen::Index size() const { return weights_.size(); }
  const Eigen::MatrixXd& support() const { return support_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  // First coordinate column; the support for d = 1.
  Eigen::VectorXd points() const { return support_.col(0); }

  // Drops weights below `threshold`, renormalizes, merges nothing.
  DiscreteDistribution pruned(double threshold = kPruneThreshold) const;
  // 1-D only: sorted by location with equal locations merged.
  DiscreteDistribution consolidated() const;
  // Maps every coordinate x -> scale * x + shift, without domain checks.
  // Used for spectra and [0, 1] data that live outside the unit cube.
  DiscreteDistribution affine(double scale, double shift) const;

 private:
  struct Unchecked {};
  DiscreteDistribution(Eigen::MatrixXd support, Eigen::VectorXd weights, Unchecked)
      : support_(std::move(support)), weights_(std::move(weights)) {}

  Eigen::MatrixXd support_;
  Eigen::VectorXd weights_;
};

// Chebyshev moments m_1..m_k.  values(j - 1) holds m_j.
struct MomentVector {
  Eigen::VectorXd values;
  ChebBasis basis = ChebBasis::kPlain;

  int degree() const { return static_cast<int>(values.size()); }
  double operator[](int j) const { return values(j - 1); }
  MomentVector in_basis(ChebBasis target) const;
};

struct MomentErrorReport {
  double gamma = 0.0;
  int k = 0;
  double w1_bound = 0.0;              // 36/k + gamma, the proven constant
  double w1_bound_conjectured = 0.0;  // 2 pi/k + gamma
};

enum class GridKind { kUniform, kChebyshevNodes, kTensorUniform };

// A 1-D grid, or the axis of a tensor grid.
struct Grid {
  GridKind kind = GridKind::kUniform;
  int resolution = 0;     // uniform: cells per unit length c; chebyshev: g
  int dim = 1;            // tensor grids repeat `points` along each axis
  double spacing = 0.0;   // uniform only: 1/c
  Eigen::VectorXd points; // sorted ascending for uniform, node order for chebyshev

  // {-1, -1 + 1/c, ..., 1}: 2c + 1 points.
  static Grid uniform(int cells_per_unit);
  static Grid chebyshev(int g);
  static Grid tensor_uniform(int cells_per_unit, int d);

  Eigen::Index axis_size() const { return points.size(); }
  Eigen::Index size() const;
  // Materialized tensor points, one per row, last axis fastest.
  Eigen::MatrixXd materialize() const;
};

MomentVector cheb_moments(const DiscreteDistribution& p, int k, ChebBasis basis);

struct MultiMoments {
  int m = 0;
  int dim = 0;
  ChebBasis basis = ChebBasis::kPlain;
  std::vector<MultiIndex> indices;  // multi_indices(m, dim) order
  Eigen::VectorXd values;
};

MultiMoments cheb_moments_multi(const DiscreteDistribution& p, int m, ChebBasis basis);

// Exact 1-D Wasserstein-1 distance: integral of |F_p - F_q|.
double w1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

// gamma = sqrt(sum_j (mp_j - mq_j)^2 / j^2), plain moments only.
MomentErrorReport moment_error_gamma(const MomentVector& mp, const MomentVector& mq);

// Nearest grid value for each point; ties go to the smaller grid value.
Eigen::VectorXd round_to_grid(const Eigen::VectorXd& points, const Grid& grid);
// Index form of round_to_grid.
std::vector<Eigen::Index> round_to_grid_index(const Eigen::VectorXd& points, const Grid& grid);

// Chebyshev node y minimizing |arccos x - arccos y|; ties go to the smaller
// node index.  Returns the index into grid.points.
Eigen::Index arccos_round_index(double x, const Grid& nodes);
double arccos_round(double x, const Grid& nodes);

}  // namespace momentforge

#endif  // MOMENTFORGE_DISTRIBUTION_HPP_
