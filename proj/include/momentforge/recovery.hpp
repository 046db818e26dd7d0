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

#ifndef MOMENTFORGE_RECOVERY_HPP_
#define MOMENTFORGE_RECOVERY_HPP_

#include <optional>

#include <Eigen/Dense>

#include "momentforge/distribution.hpp"
#include "momentforge/moment_map.hpp"

namespace momentforge {

struct SolverOptions {
  double tolerance = 1e-10;  // relative objective change
  long max_iters = 0;        // 0 means 200 * (number of grid points)
  int power_iters = 50;
  double lipschitz_headroom = 1.1;
  // Known largest eigenvalue of A^T W A (for instance cached for a fixed
  // grid); 0 means estimate it by power iteration.
  double gram_norm = 0.0;
  // Consecutive small-change iterations required before stopping.
  int stall_window = 5;
  // Objective values below this count as an exact fit (gamma near 1e-10).
  double objective_floor = 1e-20;
  // Active-set refinement of the first-order answer.  Skipped when
  // rows * support^2 exceeds polish_budget.
  bool polish = true;
  double polish_budget = 4e8;
  int polish_max_rounds = 200;

  long resolved_max_iters(Eigen::Index cols) const {
    return max_iters > 0 ? max_iters : 200L * static_cast<long>(cols);
  }
};

struct QPSolution {
  Eigen::VectorXd weights;
  double objective = 0.0;
  long iterations = 0;
  bool converged = false;
  bool polished = false;
  double lipschitz = 0.0;
};

// Euclidean projection onto {z >= 0, sum z = 1} by sort and threshold.
Eigen::VectorXd simplex_project(const Eigen::VectorXd& v);

// sum_j w_j (target_j - (A z)_j)^2
double weighted_objective(const MomentMap& map, const Eigen::VectorXd& target,
                          const Eigen::VectorXd& row_weights, const Eigen::VectorXd& z);

// min_z sum_j w_j (target_j - (A z)_j)^2 over the simplex.  Accelerated
// projected gradient with function-value restart, started from `init` or the
// uniform distribution, then an optional active-set polish.
QPSolution solve_weighted_qp(const MomentMap& map, const Eigen::VectorXd& target,
                             const Eigen::VectorXd& row_weights, const SolverOptions& options,
                             const std::optional<Eigen::VectorXd>& init = std::nullopt);

struct RecoveryConfig {
  int k = 1;
  int g = 1;
  SolverOptions solver;

  // g = ceil(k^1.5)
  static RecoveryConfig for_degree(int k);
  // g = ceil(k^1.5 sqrt(1 + log k)), the spectral-density grid.
  static RecoveryConfig for_spectral(int k);
  void validate() const;
};

// 1/j^2 for j = 1..k
Eigen::VectorXd inverse_square_weights(int k);

// Chebyshev-node grid of cfg.g points, 1/j^2 weights.  Expects plain moments.
QPSolution solve_weighted_qp(const MomentVector& m, const RecoveryConfig& cfg);

struct RecoveryResult {
  DiscreteDistribution distribution;
  MomentErrorReport report;  // of the output against the input moments
  QPSolution solution;
  int g = 0;
};

RecoveryResult recover_distribution(const MomentVector& m, const RecoveryConfig& cfg);
RecoveryResult recover_distribution(const MomentVector& m, int k);

struct LpResult {
  DiscreteDistribution distribution;
  Eigen::VectorXd weights;
  bool feasible = false;
  double max_violation = 0.0;  // max_j |(Az)_j - m_j| - tol_j, may be negative
  long iterations = 0;
};

// Any simplex point with |(A z)_j - target_j| <= tol_j.  Minimizes the squared
// hinge violation against slightly shrunk tolerances so the iterates land
// strictly inside the feasible band.
LpResult solve_moment_lp(const MomentMap& map, const Eigen::VectorXd& target,
                         const Eigen::VectorXd& tol, const SolverOptions& options);

// Chebyshev-node grid of cfg.g points; plain moments.
LpResult solve_moment_lp(const MomentVector& m, const Eigen::VectorXd& tol,
                         const RecoveryConfig& cfg);

}  // namespace momentforge

#endif  // MOMENTFORGE_RECOVERY_HPP_
