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

#ifndef MOMENTFORGE_SDE_HPP_
#define MOMENTFORGE_SDE_HPP_

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "momentforge/distribution.hpp"
#include "momentforge/recovery.hpp"

namespace momentforge {

// Symmetric matrix seen only through products.  Every apply bumps an atomic
// counter, so concurrent callers get an exact total.
class LinearOperator {
 public:
  explicit LinearOperator(Eigen::Index n) : n_(n) {}
  virtual ~LinearOperator() = default;
  LinearOperator(const LinearOperator&) = delete;
  LinearOperator& operator=(const LinearOperator&) = delete;

  Eigen::Index size() const { return n_; }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    if (x.size() != n_) throw std::invalid_argument("LinearOperator: dimension mismatch");
    count_.fetch_add(1, std::memory_order_relaxed);
    do_apply(x, y);
  }

  long matvec_count() const { return count_.load(std::memory_order_relaxed); }
  void reset_count() { count_.store(0); }

  // False when apply must not be called from several threads at once.
  virtual bool concurrent_safe() const { return true; }

 protected:
  virtual void do_apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const = 0;

 private:
  Eigen::Index n_;
  mutable std::atomic<long> count_{0};
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXd a);
  const Eigen::MatrixXd& matrix() const { return a_; }

 protected:
  void do_apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { y.noalias() = a_ * x; }

 private:
  Eigen::MatrixXd a_;
};

class SparseOperator final : public LinearOperator {
 public:
  explicit SparseOperator(Eigen::SparseMatrix<double> a);

 protected:
  void do_apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { y = a_ * x; }

 private:
  Eigen::SparseMatrix<double> a_;
};

class DiagonalOperator final : public LinearOperator {
 public:
  explicit DiagonalOperator(Eigen::VectorXd diag)
      : LinearOperator(diag.size()), d_(std::move(diag)) {}

 protected:
  void do_apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override {
    y = d_.cwiseProduct(x);
  }

 private:
  Eigen::VectorXd d_;
};

// scale * base.  Products are counted on both this wrapper and the base.
class ScaledOperator final : public LinearOperator {
 public:
  ScaledOperator(const LinearOperator& base, double scale)
      : LinearOperator(base.size()), base_(base), scale_(scale) {}
  bool concurrent_safe() const override { return base_.concurrent_safe(); }

 protected:
  void do_apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override {
    base_.apply(x, y);
    y *= scale_;
  }

 private:
  const LinearOperator& base_;
  double scale_;
};

struct NormBound {
  double S = 0.0;
  bool zero_operator = false;
};

// Power iteration from a Rademacher start.  S is twice the largest ||A v||
// over the unit iterates v, which bounds every Rayleigh quotient from above
// and never exceeds 2 ||A||.
NormBound power_method_bound(const LinearOperator& op, int iters, std::uint64_t seed);

struct SdeConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  double C = 16.0;       // probe schedule constant
  double c_hat = 80.0;   // k = ceil(c_hat / epsilon)
  std::uint64_t seed = 0;
  int power_iters = 0;   // 0 means ceil(10 log n)
  // Read A with n basis products when the planned count would reach n.
  bool allow_exact = true;
  SolverOptions solver = default_solver();

  int k() const;
  double gamma() const;  // 1 / (k sqrt(1 + log k))
  double alpha() const;  // delta / k
  void validate() const;

  static SolverOptions default_solver();
};

// l_j = ceil(1 + C log^2(1/alpha) / (n j gamma^2)) for j = 1..k, nonincreasing.
std::vector<long> probe_schedule(long n, int k, double C, double alpha, double gamma);
// Probe i runs its recurrence to degree #{j : l_j > i}, so the total is sum_j l_j.
long planned_matvecs(const std::vector<long>& schedule);

struct HutchinsonResult {
  MomentVector moments;  // plain basis
  std::vector<long> schedule;
  long matvecs = 0;
};

// Hutchinson estimates of tr(T_j(A))/n, j = 1..k, for an operator already
// scaled to norm <= 1.  Probe i uses Rademacher signs from derive_seed(seed, i).
HutchinsonResult hutchinson_cheb_moments(const LinearOperator& op, int k,
                                         const std::vector<long>& schedule, std::uint64_t seed);
HutchinsonResult hutchinson_cheb_moments(const LinearOperator& op, const SdeConfig& cfg);

struct SdeReport {
  long n = 0;
  double S = 0.0;
  int k = 0;
  double gamma = 0.0;
  double alpha = 0.0;
  int g = 0;
  long matvecs = 0;
  long planned_matvecs = 0;
  double budget_formula_value = 0.0;
  double lower_bound_floor = 0.0;  // 1/eps, informational only
  bool exact_path = false;
  bool lp_feasible = true;
  bool tolerance_doubled = false;
  double lp_max_violation = 0.0;
  long lp_iterations = 0;
};

struct SdeResult {
  DiscreteDistribution distribution;  // on the original (unscaled) axis
  SdeReport report;
};

// min{n, (1/eps)(1 + log^2(1/eps) log^2(1/(eps delta)) / (n eps))}
double sde_budget_formula(long n, double epsilon, double delta);

SdeResult estimate_spectral_density(const LinearOperator& op, const SdeConfig& cfg);

// Uniform distribution on the eigenvalues by cyclic Jacobi rotations, run
// until the off-diagonal Frobenius norm is <= 1e-10 (relative to ||A||_F).
DiscreteDistribution exact_spectral_density(const Eigen::MatrixXd& a);
Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& a);

// Matrix Market coordinate format (real, integer or pattern; general or
// symmetric).  Throws std::runtime_error with a line number on bad input.
Eigen::SparseMatrix<double> read_matrix_market(std::istream& in);
Eigen::SparseMatrix<double> read_matrix_market(const std::string& path);
// Comma separated dense square matrix, one row per line.
Eigen::MatrixXd read_dense_csv(std::istream& in);

}  // namespace momentforge

#endif  // MOMENTFORGE_SDE_HPP_
