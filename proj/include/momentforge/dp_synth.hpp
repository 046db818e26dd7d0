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

#ifndef MOMENTFORGE_DP_SYNTH_HPP_
#define MOMENTFORGE_DP_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "momentforge/distribution.hpp"
#include "momentforge/recovery.hpp"

namespace momentforge {

struct PrivacyBudget {
  double epsilon = 0.5;
  double delta = 1e-6;

  // epsilon in (0, 1], delta in (0, 1)
  void validate() const;
};

// 8 (1 + ln k) / (pi n^2)
double sensitivity_sq_bound(long n, int k);
// (16/pi)(1 + ln k) ln(1.25/delta) / (eps^2 n^2)
double dp_sigma2(long n, int k, const PrivacyBudget& budget);

// sum over K in {0..m}^d \ {0} of 1/||K||_2, summed exactly.
double normsum_exact(int m, int d);
// 4 (pi e)^{d/2} / 2^d * m^{d-1} / d
double normsum_bound(int m, int d);
// 4 2^d / pi^d * S * ln(1.25/delta) / (n^2 eps^2)
double dp_sigma2_multi(long n, int m, int d, const PrivacyBudget& budget);

// Independent N(0, variances_i) draws from NormalStream(seed).
Eigen::VectorXd gaussian_noise_vector(const Eigen::VectorXd& variances, std::uint64_t seed);
// Variance j * sigma2 for j = 1..k.
Eigen::VectorXd gaussian_noise_vector(int k, double sigma2, std::uint64_t seed);
// Variance ||K||_2 * sigma2 per multi-index.
Eigen::VectorXd gaussian_noise_vector(const std::vector<MultiIndex>& indices, double sigma2,
                                      std::uint64_t seed);

// log(eps n) sqrt(log(1/delta)) / (eps n), leading constant 1.
double expected_error_curve(long n, double epsilon, double delta);
// c1 sqrt(log(1/beta) + log(eps n)) sqrt(log(eps n) log(1/delta)) / (eps n)
double hp_error_bound(long n, double epsilon, double delta, double beta, double c1 = 1.0);

struct DpConfig {
  PrivacyBudget budget;
  std::uint64_t seed = 0;
  double k_factor = 2.0;     // k = ceil(k_factor * eps n), or m in d-D
  double grid_factor = 1.0;  // cells per unit = ceil(grid_factor * eps n)
  bool zero_noise = false;   // test hook: sigma^2 forced to 0
  SolverOptions solver = default_solver();

  // The objective keeps creeping down long after the recovered distribution
  // has stopped moving in W1, so the pipeline caps iterations.
  static SolverOptions default_solver();
};

// What leaves the privacy boundary.  values are normalized-basis moments
// (index j - 1 for degree j, or the multi_indices order in d-D).
struct NoisyMoments {
  Eigen::VectorXd values;
  Eigen::VectorXd variances;
  std::uint64_t seed = 0;
};

struct DpReport {
  long n = 0;
  int dim = 1;
  int k = 0;        // degree (1-D) or per-axis degree m (d-D)
  int cells = 0;    // grid spacing is 1 / cells
  long r = 0;       // grid points per axis
  double sigma2 = 0.0;
  double normsum = 0.0;       // d-D only
  long clamped = 0;           // inputs moved onto [-1, 1]
  double gamma = 0.0;         // output vs released moments, weighted as in the objective
  double rounding_bound = 0.0;
  double expected_bound = 0.0;   // 1-D only
  double hp_bound_beta05 = 0.0;  // 1-D only
  double objective = 0.0;
  long iterations = 0;
  bool converged = false;
};

struct DpResult {
  DiscreteDistribution distribution;
  NoisyMoments noisy;
  DpReport report;
};

// Private Chebyshev moment matching on [-1, 1].
DpResult dp_synthesize(const Eigen::VectorXd& data, const DpConfig& cfg);

// The post-processing half: reproduces the output of dp_synthesize from the
// released moments and public parameters alone.
DpResult dp_release(const NoisyMoments& noisy, long n, const DpConfig& cfg);

// The same for points in [-1, 1]^d, d in {2, 3}; rows of data are points.
DpResult dp_synthesize_multi(const Eigen::MatrixXd& data, const DpConfig& cfg);
DpResult dp_release_multi(const NoisyMoments& noisy, long n, int d, const DpConfig& cfg);

}  // namespace momentforge

#endif  // MOMENTFORGE_DP_SYNTH_HPP_
