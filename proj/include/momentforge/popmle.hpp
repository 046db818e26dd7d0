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

#ifndef MOMENTFORGE_POPMLE_HPP_
#define MOMENTFORGE_POPMLE_HPP_

#include <vector>

#include <Eigen/Dense>

#include "momentforge/distribution.hpp"

namespace momentforge {

// Fraction of coins showing s heads out of t tosses.
struct Fingerprint {
  int t = 0;
  long N = 0;
  std::vector<long> counts;  // n_0..n_t
  Eigen::VectorXd h;         // counts / N
};

// Throws std::invalid_argument on a count outside [0, t].
Fingerprint fingerprint(const std::vector<int>& observations, int t);

struct EmOptions {
  int grid_size = 1000;
  double tolerance = 1e-9;  // on the per-coin log-likelihood gain
  long max_iters = 100000;
};

struct NpmleResult {
  DiscreteDistribution distribution;  // pruned, on [0, 1]
  Eigen::VectorXd grid;
  Eigen::VectorXd weights;            // full grid weights
  std::vector<double> loglik_trace;   // per-coin mean log-likelihood
  long iterations = 0;
  bool converged = false;
  bool degenerate = false;
  // Certified upper bound on (best grid log-likelihood) - (final one), per coin.
  double optimality_gap = 0.0;
};

// Per-coin mean of log sum_i w_i Binom(t, s, y_i) weighted by h_s.
double mixture_log_likelihood(const Fingerprint& fp, const Eigen::VectorXd& grid,
                              const Eigen::VectorXd& weights);

// Nonparametric MLE of the mixing distribution by EM on {0, 1/(G-1), ..., 1}.
// Throws std::logic_error if an EM step ever lowers the likelihood.
NpmleResult npmle_em(const Fingerprint& fp, const EmOptions& options = {});

// Uniform on X_i / t.
DiscreteDistribution naive_estimator(const std::vector<int>& observations, int t);

struct BernsteinConversion {
  int t = 0;
  int m = 0;
  std::vector<double> c;  // C(t, m, j), j = 0..t

  // sum_j C(t, m, j) B_j^t(x)
  double evaluate(double x) const;
};

// Degree-t Bernstein coefficients of the shifted polynomial T_m(2x - 1).
// Requires 1 <= m <= t.
BernsteinConversion cheb_to_bernstein(int t, int m);
// (t + 1) exp(m^2 / t)
double bernstein_coefficient_bound(int t, int m);
double bernstein_basis(int t, int j, double x);
double shifted_chebyshev(int m, double x);

// W1 between distributions supported on [0, 1].
double w1_unit_interval(const DiscreteDistribution& p, const DiscreteDistribution& q);

}  // namespace momentforge

#endif  // MOMENTFORGE_POPMLE_HPP_
