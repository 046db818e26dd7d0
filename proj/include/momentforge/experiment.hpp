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

#ifndef MOMENTFORGE_EXPERIMENT_HPP_
#define MOMENTFORGE_EXPERIMENT_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "momentforge/dp_synth.hpp"

namespace momentforge {

enum class Generator { kGaussian, kSine, kPowerLaw };

// "gaussian", "sine", "powerlaw"; throws std::invalid_argument otherwise.
Generator parse_generator(const std::string& name);
const char* to_string(Generator g);
// Unnormalized density on [-1, 1].
double generator_density(Generator g, double x);

// Piecewise-linear inverse CDF of a density tabulated on a uniform grid.
class InverseCdfSampler {
 public:
  explicit InverseCdfSampler(const std::function<double(double)>& density, int grid_points = 10000);
  explicit InverseCdfSampler(Generator g, int grid_points = 10000);

  double quantile(double u) const;
  Eigen::VectorXd sample(long n, std::uint64_t seed) const;

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd cdf_;
};

struct DpSweepConfig {
  Generator generator = Generator::kGaussian;
  long n_min = 128;
  long n_max = 8192;
  int trials = 10;
  double epsilon = 0.5;
  double delta = 0.0;  // 0 means 1/n^2
  std::uint64_t seed = 0;
  int jobs = 1;
  SolverOptions solver = DpConfig::default_solver();

  // Powers of two from n_min to n_max; both must be powers of two.
  std::vector<long> sizes() const;
  double delta_for(long n) const { return delta > 0.0 ? delta : 1.0 / (double(n) * double(n)); }
};

struct DpSweepRow {
  long n = 0;
  int trial = 0;
  double w1 = 0.0;
  double expected_bound = 0.0;
};

// One trial: draw n points, synthesize, W1 to the uniform distribution on
// the sample.  The sample and the noise use separate derived seeds.
DpSweepRow dp_trial(const DpSweepConfig& cfg, const InverseCdfSampler& sampler, long n, int trial);

// All (n, trial) pairs on cfg.jobs threads, ordered by (n, trial).
std::vector<DpSweepRow> run_dp_sweep(const DpSweepConfig& cfg);

std::string sweep_csv(const std::vector<DpSweepRow>& rows);

// Mean W1 per n, in increasing n.
std::vector<std::pair<long, double>> mean_w1_by_n(const std::vector<DpSweepRow>& rows);
// Least-squares slope of log(mean w1) against log n.
double loglog_slope(const std::vector<DpSweepRow>& rows);

// Runs task(i) for i in [0, count) on `jobs` threads.
void parallel_for(long count, int jobs, const std::function<void(long)>& task);

}  // namespace momentforge

#endif  // MOMENTFORGE_EXPERIMENT_HPP_
