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

#include "momentforge/dp_synth.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "momentforge/moment_map.hpp"
#include "momentforge/random.hpp"

namespace momentforge {

void PrivacyBudget::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0, 1)");
}

double sensitivity_sq_bound(long n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("sensitivity_sq_bound: n and k must be >= 1");
  const double nd = static_cast<double>(n);
  return 8.0 * (1.0 + std::log(static_cast<double>(k))) / (std::numbers::pi * nd * nd);
}

double dp_sigma2(long n, int k, const PrivacyBudget& budget) {
  budget.validate();
  // Gaussian mechanism: Delta^2 * 2 ln(1.25/delta) / eps^2.
  return sensitivity_sq_bound(n, k) * 2.0 * std::log(1.25 / budget.delta) /
         (budget.epsilon * budget.epsilon);
}

double normsum_exact(int m, int d) {
  if (m < 1 || d < 1 || d > 3) throw std::invalid_argument("normsum_exact: bad m or d");
  double sum = 0.0;
  for (const MultiIndex& k : multi_indices(m, d)) sum += 1.0 / k.norm2();
  return sum;
}

double normsum_bound(int m, int d) {
  if (m < 1 || d < 1) throw std::invalid_argument("normsum_bound: bad m or d");
  const double pi_e = std::numbers::pi * std::numbers::e;
  return 4.0 * std::pow(pi_e, 0.5 * d) / std::pow(2.0, d) * std::pow(static_cast<double>(m), d - 1) /
         static_cast<double>(d);
}

double dp_sigma2_multi(long n, int m, int d, const PrivacyBudget& budget) {
  budget.validate();
  if (n < 1) throw std::invalid_argument("dp_sigma2_multi: n must be >= 1");
  const double nd = static_cast<double>(n);
  return 4.0 * std::pow(2.0, d) / std::pow(std::numbers::pi, d) * normsum_exact(m, d) *
         std::log(1.25 / budget.delta) / (nd * nd * budget.epsilon * budget.epsilon);
}

Eigen::VectorXd gaussian_noise_vector(const Eigen::VectorXd& variances, std::uint64_t seed) {
  if ((variances.array() < 0.0).any()) throw std::invalid_argument("noise variance must be >= 0");
  NormalStream normal(seed);
  Eigen::VectorXd out(variances.size());
  for (Eigen::Index i = 0; i < variances.size(); ++i) out(i) = std::sqrt(variances(i)) * normal.next();
  return out;
}

Eigen::VectorXd gaussian_noise_vector(int k, double sigma2, std::uint64_t seed) {
  Eigen::VectorXd var(k);
  for (int j = 1; j <= k; ++j) var(j - 1) = j * sigma2;
  return gaussian_noise_vector(var, seed);
}

Eigen::VectorXd gaussian_noise_vector(const std::vector<MultiIndex>& indices, double sigma2,
                                      std::uint64_t seed) {
  Eigen::VectorXd var(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    var(static_cast<Eigen::Index>(i)) = indices[i].norm2() * sigma2;
  }
  return gaussian_noise_vector(var, seed);
}

double expected_error_curve(long n, double epsilon, double delta) {
  const double en = epsilon * static_cast<double>(n);
  return std::log(en) * std::sqrt(std::log(1.0 / delta)) / en;
}

double hp_error_bound(long n, double epsilon, double delta, double beta, double c1) {
  const double en = epsilon * static_cast<double>(n);
  const double le = std::log(en);
  return c1 * std::sqrt(std::log(1.0 / beta) + le) * std::sqrt(le * std::log(1.0 / delta)) / en;
}

SolverOptions DpConfig::default_solver() {
  SolverOptions o;
  o.max_iters = 200;
  o.tolerance = 1e-7;
  o.power_iters = 30;
  o.polish_budget = 2e7;
  return o;
}

namespace {

// lambda_max of the weighted Gram operator depends only on public grid
// parameters, so repeated trials share one estimate.
double cached_gram_norm(const MomentMap& map, const Eigen::VectorXd& weights, int cells, int k,
                        int d, int power_iters) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>, double> cache;
  const auto key = std::make_tuple(cells, k, d, power_iters);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double value = gram_norm_estimate(map, weights, power_iters);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, value);
  return value;
}

struct Shape {
  long n;
  int cells;
  int k;
};

Shape shape_1d(long n, const DpConfig& cfg) {
  cfg.budget.validate();
  if (n < 2) throw std::invalid_argument("dp_synthesize: need n >= 2");
  const double en = cfg.budget.epsilon * static_cast<double>(n);
  if (en < 1.0) throw std::invalid_argument("dp_synthesize: eps * n < 1 makes the grid degenerate");
  return {n, ceil_robust(cfg.grid_factor * en), ceil_robust(cfg.k_factor * en)};
}

Shape shape_multi(long n, int d, const DpConfig& cfg) {
  cfg.budget.validate();
  if (d < 2 || d > 3) throw std::invalid_argument("dp_synthesize_multi: d must be 2 or 3");
  if (n < 2) throw std::invalid_argument("dp_synthesize_multi: need n >= 2");
  const double en = cfg.budget.epsilon * static_cast<double>(n);
  if (en < 1.0) throw std::invalid_argument("dp_synthesize_multi: eps * n < 1 makes the grid degenerate");
  const double root = std::pow(en, 1.0 / d);
  return {n, ceil_robust(cfg.grid_factor * root), ceil_robust(cfg.k_factor * root)};
}

long clamp_in_place(double* begin, long count) {
  long moved = 0;
  for (long i = 0; i < count; ++i) {
    double& v = begin[i];
    if (!std::isfinite(v)) throw std::invalid_argument("dp_synthesize: non-finite data value");
    if (v < -1.0 || v > 1.0) {
      v = std::clamp(v, -1.0, 1.0);
      ++moved;
    }
  }
  return moved;
}

}  // namespace

DpResult dp_release(const NoisyMoments& noisy, long n, const DpConfig& cfg) {
  const Shape sh = shape_1d(n, cfg);
  if (noisy.values.size() != sh.k) throw std::invalid_argument("dp_release: moment count != k");
  const Grid grid = Grid::uniform(sh.cells);
  const ChebyshevMomentMap map(grid.points, sh.k);
  // The mechanism releases normalized moments; the regression is in plain T_j.
  Eigen::VectorXd target = noisy.values / normalized_scale<double>(1);
  const Eigen::VectorXd w = inverse_square_weights(sh.k);
  SolverOptions opts = cfg.solver;
  if (opts.gram_norm <= 0.0) {
    opts.gram_norm = cached_gram_norm(map, w, sh.cells, sh.k, 1, opts.power_iters);
  }
  const QPSolution sol = solve_weighted_qp(map, target, w, opts);

  DpResult out;
  out.noisy = noisy;
  out.distribution = DiscreteDistribution::on_line(grid.points, sol.weights).pruned();
  DpReport& rep = out.report;
  rep.n = n;
  rep.dim = 1;
  rep.k = sh.k;
  rep.cells = sh.cells;
  rep.r = grid.axis_size();
  rep.sigma2 = cfg.zero_noise ? 0.0 : dp_sigma2(n, sh.k, cfg.budget);
  rep.gamma = std::sqrt(sol.objective);
  rep.rounding_bound = 1.0 / (2.0 * sh.cells);
  rep.expected_bound = expected_error_curve(n, cfg.budget.epsilon, cfg.budget.delta);
  rep.hp_bound_beta05 = hp_error_bound(n, cfg.budget.epsilon, cfg.budget.delta, 0.05);
  rep.objective = sol.objective;
  rep.iterations = sol.iterations;
  rep.converged = sol.converged;
  return out;
}

DpResult dp_synthesize(const Eigen::VectorXd& data, const DpConfig& cfg) {
  const Shape sh = shape_1d(static_cast<long>(data.size()), cfg);
  Eigen::VectorXd x = data;
  const long clamped = clamp_in_place(x.data(), static_cast<long>(x.size()));
  const Grid grid = Grid::uniform(sh.cells);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(grid.axis_size());
  for (Eigen::Index idx : round_to_grid_index(x, grid)) mass(idx) += 1.0;
  mass /= static_cast<double>(sh.n);

  const ChebyshevMomentMap map(grid.points, sh.k);
  Eigen::VectorXd plain;
  map.apply(mass, plain);
  const double sigma2 = cfg.zero_noise ? 0.0 : dp_sigma2(sh.n, sh.k, cfg.budget);

  NoisyMoments noisy;
  noisy.seed = cfg.seed;
  noisy.variances.resize(sh.k);
  for (int j = 1; j <= sh.k; ++j) noisy.variances(j - 1) = j * sigma2;
  noisy.values = plain * normalized_scale<double>(1) + gaussian_noise_vector(noisy.variances, cfg.seed);

  DpResult out = dp_release(noisy, sh.n, cfg);
  out.report.clamped = clamped;
  return out;
}

DpResult dp_release_multi(const NoisyMoments& noisy, long n, int d, const DpConfig& cfg) {
  const Shape sh = shape_multi(n, d, cfg);
  const Grid grid = Grid::tensor_uniform(sh.cells, d);
  const TensorMomentMap map(grid.points, sh.k, d);
  if (noisy.values.size() != map.rows()) throw std::invalid_argument("dp_release_multi: moment count mismatch");
  Eigen::VectorXd w(map.rows());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) = 1.0 / static_cast<double>(map.indices()[static_cast<std::size_t>(i)].norm2_squared());
  }
  SolverOptions opts = cfg.solver;
  if (opts.gram_norm <= 0.0) {
    opts.gram_norm = cached_gram_norm(map, w, sh.cells, sh.k, d, opts.power_iters);
  }
  const QPSolution sol = solve_weighted_qp(map, noisy.values, w, opts);

  DpResult out;
  out.noisy = noisy;
  out.distribution = DiscreteDistribution(grid.materialize(), sol.weights).pruned();
  DpReport& rep = out.report;
  rep.n = n;
  rep.dim = d;
  rep.k = sh.k;
  rep.cells = sh.cells;
  rep.r = grid.axis_size();
  rep.normsum = normsum_exact(sh.k, d);
  rep.sigma2 = cfg.zero_noise ? 0.0 : dp_sigma2_multi(n, sh.k, d, cfg.budget);
  rep.gamma = std::sqrt(sol.objective);
  rep.rounding_bound = static_cast<double>(d) / (2.0 * sh.cells);
  rep.objective = sol.objective;
  rep.iterations = sol.iterations;
  rep.converged = sol.converged;
  return out;
}

DpResult dp_synthesize_multi(const Eigen::MatrixXd& data, const DpConfig& cfg) {
  const int d = static_cast<int>(data.cols());
  const Shape sh = shape_multi(static_cast<long>(data.rows()), d, cfg);
  Eigen::MatrixXd x = data;
  const long clamped = clamp_in_place(x.data(), static_cast<long>(x.size()));
  const Grid grid = Grid::tensor_uniform(sh.cells, d);
  const Eigen::Index r = grid.axis_size();

  Eigen::VectorXd mass = Eigen::VectorXd::Zero(grid.size());
  std::vector<std::vector<Eigen::Index>> axis_idx;
  for (int a = 0; a < d; ++a) axis_idx.push_back(round_to_grid_index(x.col(a), grid));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index flat = 0;
    for (int a = 0; a < d; ++a) flat = flat * r + axis_idx[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)];
    mass(flat) += 1.0;
  }
  mass /= static_cast<double>(sh.n);

  const TensorMomentMap map(grid.points, sh.k, d);
  Eigen::VectorXd exact;
  map.apply(mass, exact);
  const double sigma2 = cfg.zero_noise ? 0.0 : dp_sigma2_multi(sh.n, sh.k, d, cfg.budget);

  NoisyMoments noisy;
  noisy.seed = cfg.seed;
  noisy.variances.resize(map.rows());
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    noisy.variances(i) = map.indices()[static_cast<std::size_t>(i)].norm2() * sigma2;
  }
  noisy.values = exact + gaussian_noise_vector(noisy.variances, cfg.seed);

  DpResult out = dp_release_multi(noisy, sh.n, d, cfg);
  out.report.clamped = clamped;
  return out;
}

}  // namespace momentforge
