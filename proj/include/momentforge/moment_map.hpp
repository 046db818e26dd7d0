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

#ifndef MOMENTFORGE_MOMENT_MAP_HPP_
#define MOMENTFORGE_MOMENT_MAP_HPP_

#include <vector>

#include <Eigen/Dense>

#include "momentforge/chebyshev.hpp"

namespace momentforge {

// Linear map from weights on a fixed grid to Chebyshev moments.  The matrix is
// never materialized; apply/adjoint regenerate T_j(x_i) by recurrence.
class MomentMap {
 public:
  virtual ~MomentMap() = default;

  virtual Eigen::Index rows() const = 0;  // number of moments
  virtual Eigen::Index cols() const = 0;  // number of grid points

  // out = A z
  virtual void apply(const Eigen::VectorXd& z, Eigen::VectorXd& out) const = 0;
  // out = A^T y
  virtual void adjoint(const Eigen::VectorXd& y, Eigen::VectorXd& out) const = 0;
  // Column i of A, i.e. the moments of a point mass at grid point i.
  virtual Eigen::VectorXd column(Eigen::Index i) const = 0;
};

// Rows j = 1..k, columns grid points x_i; entry T_j(x_i) (plain basis).
class ChebyshevMomentMap final : public MomentMap {
 public:
  ChebyshevMomentMap(Eigen::VectorXd grid, int k);

  Eigen::Index rows() const override { return k_; }
  Eigen::Index cols() const override { return x_.size(); }
  void apply(const Eigen::VectorXd& z, Eigen::VectorXd& out) const override;
  void adjoint(const Eigen::VectorXd& y, Eigen::VectorXd& out) const override;
  Eigen::VectorXd column(Eigen::Index i) const override;

  const Eigen::ArrayXd& grid() const { return x_; }

 private:
  Eigen::ArrayXd x_;
  int k_;
};

// Tensor grid {points}^d with rows K in multi_indices(m, d); entry
// Tbar_K(g_J) (normalized basis).  Grid points are flattened with the last
// axis fastest, matching Grid::materialize.
class TensorMomentMap final : public MomentMap {
 public:
  TensorMomentMap(const Eigen::VectorXd& axis_points, int m, int d);

  Eigen::Index rows() const override;
  Eigen::Index cols() const override;
  void apply(const Eigen::VectorXd& z, Eigen::VectorXd& out) const override;
  void adjoint(const Eigen::VectorXd& y, Eigen::VectorXd& out) const override;
  Eigen::VectorXd column(Eigen::Index i) const override;

  const std::vector<MultiIndex>& indices() const { return indices_; }

 private:
  // basis_(k, i) = Tbar_k(x_i), (m + 1) x r.
  Eigen::MatrixXd basis_;
  int m_;
  int d_;
  std::vector<MultiIndex> indices_;
};

// lambda_max(A^T W A) estimated by `iters` power iterations from a fixed
// deterministic start vector.
double gram_norm_estimate(const MomentMap& map, const Eigen::VectorXd& row_weights, int iters);

}  // namespace momentforge

#endif  // MOMENTFORGE_MOMENT_MAP_HPP_
