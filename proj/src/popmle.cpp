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

#include "momentforge/popmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace momentforge {
namespace {

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log Binom(t, s, y), with 0 log 0 = 0.
double log_binom_pmf(int t, int s, double y) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double out = log_choose(t, s);
  if (s > 0) out += (y > 0.0) ? s * std::log(y) : neg_inf;
  if (t - s > 0) out += (y < 1.0) ? (t - s) * std::log1p(-y) : neg_inf;
  return out;
}

Eigen::MatrixXd binom_table(int t, const Eigen::VectorXd& grid) {
  Eigen::MatrixXd b(t + 1, grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    for (int s = 0; s <= t; ++s) b(s, i) = std::exp(log_binom_pmf(t, s, grid(i)));
  return b;
}

double log_likelihood_from_mix(const Eigen::VectorXd& h, const Eigen::VectorXd& mix) {
  double ll = 0.0;
  for (Eigen::Index s = 0; s < h.size(); ++s)
    if (h(s) > 0.0) ll += h(s) * std::log(mix(s));
  return ll;
}

void check_support_unit(const DiscreteDistribution& p, const char* what) {
  if (p.dim() != 1) throw std::invalid_argument(std::string(what) + ": expected a 1-D distribution");
  constexpr double slack = 1e-12;
  const Eigen::VectorXd x = p.points();
  if (x.size() > 0 && (x.minCoeff() < -slack || x.maxCoeff() > 1.0 + slack))
    throw std::invalid_argument(std::string(what) + ": support outside [0, 1]");
}

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Rows 0..n of Pascal's triangle.
std::vector<std::vector<cpp_int>> pascal(int n) {
  std::vector<std::vector<cpp_int>> rows(n + 1);
  for (int r = 0; r <= n; ++r) {
    rows[r].assign(r + 1, cpp_int(1));
    for (int k = 1; k < r; ++k) rows[r][k] = rows[r - 1][k - 1] + rows[r - 1][k];
  }
  return rows;
}

}  // namespace

Fingerprint fingerprint(const std::vector<int>& observations, int t) {
  if (t < 1) throw std::invalid_argument("fingerprint: t must be >= 1");
  Fingerprint fp;
  fp.t = t;
  fp.counts.assign(t + 1, 0);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const int x = observations[i];
    if (x < 0 || x > t)
      throw std::invalid_argument("fingerprint: observation " + std::to_string(i + 1) + " = " +
                                  std::to_string(x) + " outside [0, " + std::to_string(t) + "]");
    ++fp.counts[x];
  }
  fp.N = static_cast<long>(observations.size());
  if (fp.N == 0) throw std::invalid_argument("fingerprint: no observations");
  fp.h.resize(t + 1);
  for (int s = 0; s <= t; ++s) fp.h(s) = static_cast<double>(fp.counts[s]) / fp.N;
  return fp;
}

double mixture_log_likelihood(const Fingerprint& fp, const Eigen::VectorXd& grid,
                              const Eigen::VectorXd& weights) {
  const Eigen::VectorXd mix = binom_table(fp.t, grid) * weights;
  return log_likelihood_from_mix(fp.h, mix);
}

NpmleResult npmle_em(const Fingerprint& fp, const EmOptions& options) {
  if (options.grid_size < 2) throw std::invalid_argument("npmle_em: grid size must be >= 2");
  if (fp.t < 1 || fp.h.size() != fp.t + 1) throw std::invalid_argument("npmle_em: bad fingerprint");
  const int G = options.grid_size;
  NpmleResult res;
  res.grid = Eigen::VectorXd::LinSpaced(G, 0.0, 1.0);

  Eigen::Index top = 0;
  if (fp.h.maxCoeff(&top) >= 1.0) {
    // All coins agree: s/t maximizes every factor of the likelihood.
    const double y = static_cast<double>(top) / fp.t;
    res.degenerate = true;
    res.converged = true;
    res.distribution = DiscreteDistribution::point_mass(y);
    res.weights = Eigen::VectorXd::Zero(G);
    Eigen::Index nearest = 0;
    (res.grid.array() - y).abs().minCoeff(&nearest);
    res.weights(nearest) = 1.0;
    res.loglik_trace.push_back(log_binom_pmf(fp.t, static_cast<int>(top), y));
    return res;
  }

  const Eigen::MatrixXd b = binom_table(fp.t, res.grid);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(G, 1.0 / G);
  Eigen::VectorXd mix = b * w;
  double ll = log_likelihood_from_mix(fp.h, mix);
  res.loglik_trace.push_back(ll);

  Eigen::VectorXd ratio(fp.t + 1);
  for (long it = 0; it < options.max_iters; ++it) {
    for (int s = 0; s <= fp.t; ++s) ratio(s) = fp.h(s) > 0.0 ? fp.h(s) / mix(s) : 0.0;
    w = w.cwiseProduct(b.transpose() * ratio);
    const double total = w.sum();
    if (std::abs(total - 1.0) > 1e-9) throw std::logic_error("npmle_em: weights left the simplex");
    w /= total;
    mix.noalias() = b * w;
    const double next = log_likelihood_from_mix(fp.h, mix);
    res.iterations = it + 1;
    res.loglik_trace.push_back(next);
    if (next < ll - 1e-12 * std::max(1.0, std::abs(ll)))
      throw std::logic_error("npmle_em: log-likelihood decreased");
    const double gain = next - ll;
    ll = next;
    if (gain < options.tolerance) {
      res.converged = true;
      break;
    }
  }
  // L(w*) - L(w) <= sum_s h_s mix*_s / mix_s - 1 <= max_i (B^T ratio)_i - 1.
  for (int s = 0; s <= fp.t; ++s) ratio(s) = fp.h(s) > 0.0 ? fp.h(s) / mix(s) : 0.0;
  res.optimality_gap = std::max(0.0, (b.transpose() * ratio).maxCoeff() - 1.0);
  res.weights = w;
  res.distribution = DiscreteDistribution::on_line(res.grid, w).pruned();
  return res;
}

DiscreteDistribution naive_estimator(const std::vector<int>& observations, int t) {
  if (t < 1) throw std::invalid_argument("naive_estimator: t must be >= 1");
  if (observations.empty()) throw std::invalid_argument("naive_estimator: no observations");
  Eigen::MatrixXd pts(observations.size(), 1);
  for (std::size_t i = 0; i < observations.size(); ++i)
    pts(i, 0) = static_cast<double>(observations[i]) / t;
  return DiscreteDistribution::uniform(pts);
}

double bernstein_basis(int t, int j, double x) {
  if (j < 0 || j > t) return 0.0;
  return std::exp(log_choose(t, j)) * std::pow(x, j) * std::pow(1.0 - x, t - j);
}

double shifted_chebyshev(int m, double x) { return chebyshev_t(m, 2.0 * x - 1.0); }

double bernstein_coefficient_bound(int t, int m) {
  return (t + 1.0) * std::exp(static_cast<double>(m) * m / t);
}

double BernsteinConversion::evaluate(double x) const {
  // de Casteljau is stable for the large alternating coefficients.
  std::vector<long double> beta(c.begin(), c.end());
  const long double xl = x;
  for (int r = 1; r <= t; ++r)
    for (int j = 0; j <= t - r; ++j) beta[j] = (1.0L - xl) * beta[j] + xl * beta[j + 1];
  return static_cast<double>(beta[0]);
}

BernsteinConversion cheb_to_bernstein(int t, int m) {
  if (m < 1 || m > t) throw std::invalid_argument("cheb_to_bernstein: need 1 <= m <= t");
  BernsteinConversion out;
  out.t = t;
  out.m = m;
  out.c.assign(t + 1, 0.0);
  // The alternating sum cancels badly in floating point once t passes ~60,
  // so it is done in exact integers and rounded once.
  const auto binom = pascal(2 * m > t ? 2 * m : t);
  for (int j = 0; j <= t; ++j) {
    const int lo = std::max(0, j - (t - m));
    const int hi = std::min(m, j);
    cpp_int num = 0;
    for (int i = lo; i <= hi; ++i) {
      const cpp_int term = binom[2 * m][2 * i] * binom[t - m][j - i];
      if ((m - i) % 2 == 0)
        num += term;
      else
        num -= term;
    }
    out.c[j] = cpp_rational(num, binom[t][j]).convert_to<double>();
  }
  return out;
}

double w1_unit_interval(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  check_support_unit(p, "w1_unit_interval");
  check_support_unit(q, "w1_unit_interval");
  return 0.5 * w1_distance(p.affine(2.0, -1.0), q.affine(2.0, -1.0));
}

}  // namespace momentforge
