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

#include "momentforge/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <numbers>
#include <stdexcept>
#include <mutex>
#include <thread>

#include "momentforge/random.hpp"

namespace momentforge {

Generator parse_generator(const std::string& name) {
  if (name == "gaussian") return Generator::kGaussian;
  if (name == "sine") return Generator::kSine;
  if (name == "powerlaw") return Generator::kPowerLaw;
  throw std::invalid_argument("unknown generator '" + name + "' (gaussian, sine, powerlaw)");
}

const char* to_string(Generator g) {
  switch (g) {
    case Generator::kGaussian: return "gaussian";
    case Generator::kSine: return "sine";
    case Generator::kPowerLaw: return "powerlaw";
  }
  return "?";
}

double generator_density(Generator g, double x) {
  switch (g) {
    case Generator::kGaussian: return std::exp(-0.5 * x * x);
    case Generator::kSine: return std::sin(std::numbers::pi * x) + 1.0;
    case Generator::kPowerLaw: return 1.0 / ((x + 1.1) * (x + 1.1));
  }
  return 0.0;
}

InverseCdfSampler::InverseCdfSampler(const std::function<double(double)>& density, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("InverseCdfSampler: need >= 2 grid points");
  x_ = Eigen::VectorXd::LinSpaced(grid_points, -1.0, 1.0);
  cdf_.resize(grid_points);
  cdf_(0) = 0.0;
  double prev = density(x_(0));
  for (int i = 1; i < grid_points; ++i) {
    const double cur = density(x_(i));
    if (cur < 0.0 || !std::isfinite(cur)) throw std::invalid_argument("InverseCdfSampler: bad density");
    cdf_(i) = cdf_(i - 1) + 0.5 * (prev + cur) * (x_(i) - x_(i - 1));
    prev = cur;
  }
  if (!(cdf_(grid_points - 1) > 0.0)) throw std::invalid_argument("InverseCdfSampler: zero mass");
  cdf_ /= cdf_(grid_points - 1);
}

InverseCdfSampler::InverseCdfSampler(Generator g, int grid_points)
    : InverseCdfSampler([g](double x) { return generator_density(g, x); }, grid_points) {}

double InverseCdfSampler::quantile(double u) const {
  const auto* b = cdf_.data();
  const auto* e = b + cdf_.size();
  const auto it = std::upper_bound(b, e, u);
  if (it == b) return x_(0);
  if (it == e) return x_(x_.size() - 1);
  const Eigen::Index i = it - b;
  const double span = cdf_(i) - cdf_(i - 1);
  const double t = span > 0.0 ? (u - cdf_(i - 1)) / span : 0.0;
  return x_(i - 1) + t * (x_(i) - x_(i - 1));
}

Eigen::VectorXd InverseCdfSampler::sample(long n, std::uint64_t seed) const {
  SplitMix64 rng(seed);
  Eigen::VectorXd out(n);
  for (long i = 0; i < n; ++i) out(i) = quantile(rng.uniform());
  return out;
}

std::vector<long> DpSweepConfig::sizes() const {
  auto pow2 = [](long v) { return v > 0 && (v & (v - 1)) == 0; };
  if (!pow2(n_min) || !pow2(n_max) || n_min > n_max)
    throw std::invalid_argument("n range must be powers of two with nmin <= nmax");
  std::vector<long> out;
  for (long n = n_min; n <= n_max; n *= 2) out.push_back(n);
  return out;
}

DpSweepRow dp_trial(const DpSweepConfig& cfg, const InverseCdfSampler& sampler, long n, int trial) {
  const std::uint64_t base =
      derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(trial));
  const Eigen::VectorXd data = sampler.sample(n, derive_seed(base, 0));
  DpConfig dc;
  dc.budget.epsilon = cfg.epsilon;
  dc.budget.delta = cfg.delta_for(n);
  dc.seed = derive_seed(base, 1);
  dc.solver = cfg.solver;
  const DpResult res = dp_synthesize(data, dc);
  DpSweepRow row;
  row.n = n;
  row.trial = trial;
  row.w1 = w1_distance(DiscreteDistribution::uniform(data), res.distribution);
  row.expected_bound = expected_error_curve(n, dc.budget.epsilon, dc.budget.delta);
  return row;
}

void parallel_for(long count, int jobs, const std::function<void(long)>& task) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::max(1L, count))));
  if (jobs == 1) {
    for (long i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (long i = next++; i < count && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<DpSweepRow> run_dp_sweep(const DpSweepConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const std::vector<long> ns = cfg.sizes();
  const InverseCdfSampler sampler(cfg.generator);
  std::vector<DpSweepRow> rows(ns.size() * cfg.trials);
  parallel_for(static_cast<long>(rows.size()), cfg.jobs, [&](long i) {
    rows[i] = dp_trial(cfg, sampler, ns[i / cfg.trials], static_cast<int>(i % cfg.trials));
  });
  return rows;
}

std::string sweep_csv(const std::vector<DpSweepRow>& rows) {
  std::string out = "n,trial,w1,expected_bound\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%ld,%d,%.17g,%.17g\n", r.n, r.trial, r.w1, r.expected_bound);
    out += buf;
  }
  return out;
}

std::vector<std::pair<long, double>> mean_w1_by_n(const std::vector<DpSweepRow>& rows) {
  std::map<long, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    acc[r.n].first += r.w1;
    ++acc[r.n].second;
  }
  std::vector<std::pair<long, double>> out;
  for (const auto& [n, s] : acc) out.emplace_back(n, s.first / s.second);
  return out;
}

double loglog_slope(const std::vector<DpSweepRow>& rows) {
  const auto means = mean_w1_by_n(rows);
  if (means.size() < 2) throw std::invalid_argument("loglog_slope: need at least two sizes");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(means.size());
  for (const auto& [n, w] : means) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(w);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace momentforge
