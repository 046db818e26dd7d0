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

#include "momentforge/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace momentforge {

Eigen::VectorXd simplex_project(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n == 0) throw std::invalid_argument("simplex_project: empty vector");
  if (!v.allFinite()) throw std::invalid_argument("simplex_project: non-finite entry");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumsum += u[static_cast<std::size_t>(i)];
    const double candidate = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

double weighted_objective(const MomentMap& map, const Eigen::VectorXd& target,
                          const Eigen::VectorXd& row_weights, const Eigen::VectorXd& z) {
  Eigen::VectorXd az;
  map.apply(z, az);
  return (row_weights.array() * (az - target).array().square()).sum();
}

namespace {

struct FistaState {
  Eigen::VectorXd x;
  Eigen::VectorXd ax;
  double f = 0.0;
  long iterations = 0;
  bool stopped = false;
};

// Accelerated projected gradient over the simplex for objectives of the form
// phi(A z).  eval(az, dual) returns phi and, when dual is non-null, writes
// grad phi so the gradient in z is A^T dual.  Restarts momentum whenever the
// objective would increase, so accepted values never go up.  A y is formed
// from cached products since A is linear: one apply and one adjoint per step.
template <class Eval, class Stop>
FistaState fista_simplex(const MomentMap& map, Eval&& eval, double lipschitz, Eigen::VectorXd x0,
                         long max_iters, Stop&& stop) {
  FistaState s;
  s.x = std::move(x0);
  map.apply(s.x, s.ax);
  s.f = eval(s.ax, nullptr);
  if (stop(std::numeric_limits<double>::infinity(), s.f, s.ax)) {
    s.stopped = true;
    return s;
  }
  Eigen::VectorXd x_prev = s.x;
  Eigen::VectorXd ax_prev = s.ax;
  Eigen::VectorXd y, ay, dual, grad, x_new, ax_new;
  double t = 1.0;
  const double step = 1.0 / lipschitz;
  while (s.iterations < max_iters) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    y = s.x + beta * (s.x - x_prev);
    ay = s.ax + beta * (s.ax - ax_prev);
    eval(ay, &dual);
    map.adjoint(dual, grad);
    x_new = simplex_project(y - step * grad);
    map.apply(x_new, ax_new);
    const double f_new = eval(ax_new, nullptr);
    ++s.iterations;
    if (!(f_new <= s.f)) {
      // A plain projected step cannot increase f, so an increase there is
      // rounding noise at the optimum.
      if (beta == 0.0) {
        s.stopped = true;
        break;
      }
      t = 1.0;
      x_prev = s.x;
      ax_prev = s.ax;
      continue;
    }
    x_prev.swap(s.x);
    ax_prev.swap(s.ax);
    s.x.swap(x_new);
    s.ax.swap(ax_new);
    const double f_old = s.f;
    s.f = f_new;
    t = t_next;
    if (stop(f_old, s.f, s.ax)) {
      s.stopped = true;
      break;
    }
  }
  return s;
}

// Minimizes ||diag(sqrt w)(A_S u - b)|| subject to sum u = 1 by eliminating the
// constraint: u = ref + Z v with Z columns e_i - e_last.
Eigen::VectorXd equality_ls(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& ref) {
  const Eigen::Index s = m.cols();
  if (s == 1) return Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd mz = m.leftCols(s - 1);
  mz.colwise() -= m.col(s - 1);
  const Eigen::VectorXd rhs = b - m * ref;
  const Eigen::VectorXd v = mz.completeOrthogonalDecomposition().solve(rhs);
  Eigen::VectorXd u = ref;
  u.head(s - 1) += v;
  u(s - 1) -= v.sum();
  return u;
}

// Primal active-set refinement starting from a feasible x.  Returns true when
// KKT conditions hold on exit.
bool polish_active_set(const MomentMap& map, const Eigen::VectorXd& target,
                       const Eigen::VectorXd& row_weights, const SolverOptions& options,
                       Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x(i) > 0.0) support.push_back(i);
  }
  const Eigen::VectorXd sqrt_w = row_weights.array().sqrt().matrix();
  const Eigen::VectorXd b = sqrt_w.cwiseProduct(target);
  const double rows = static_cast<double>(map.rows());
  Eigen::VectorXd ax, grad;
  for (int round = 0; round < options.polish_max_rounds; ++round) {
    const auto s = static_cast<Eigen::Index>(support.size());
    if (s == 0) return false;
    if (rows * static_cast<double>(s) * static_cast<double>(s) > options.polish_budget) return false;
    Eigen::MatrixXd m(map.rows(), s);
    Eigen::VectorXd xs(s);
    for (Eigen::Index c = 0; c < s; ++c) {
      m.col(c) = sqrt_w.cwiseProduct(map.column(support[static_cast<std::size_t>(c)]));
      xs(c) = x(support[static_cast<std::size_t>(c)]);
    }
    const Eigen::VectorXd u = equality_ls(m, b, xs / xs.sum());
    if (!u.allFinite()) return false;
    if (u.minCoeff() >= 0.0) {
      for (Eigen::Index c = 0; c < s; ++c) x(support[static_cast<std::size_t>(c)]) = u(c);
      map.apply(x, ax);
      map.adjoint((2.0 * row_weights.array() * (ax - target).array()).matrix(), grad);
      double mu = 0.0;
      for (Eigen::Index idx : support) mu += grad(idx);
      mu /= static_cast<double>(s);
      const double kkt_tol = 1e-9 * (1.0 + grad.cwiseAbs().maxCoeff());
      Eigen::Index entering = -1;
      double most_negative = -kkt_tol;
      std::vector<char> in_support(static_cast<std::size_t>(n), 0);
      for (Eigen::Index idx : support) in_support[static_cast<std::size_t>(idx)] = 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (in_support[static_cast<std::size_t>(i)]) continue;
        if (grad(i) - mu < most_negative) {
          most_negative = grad(i) - mu;
          entering = i;
        }
      }
      if (entering < 0) return true;
      support.insert(std::upper_bound(support.begin(), support.end(), entering), entering);
      continue;
    }
    // Step toward u until the first weight hits zero, then drop it.
    double alpha = 1.0;
    for (Eigen::Index c = 0; c < s; ++c) {
      if (u(c) < 0.0) alpha = std::min(alpha, xs(c) / (xs(c) - u(c)));
    }
    std::vector<Eigen::Index> kept;
    for (Eigen::Index c = 0; c < s; ++c) {
      const Eigen::Index idx = support[static_cast<std::size_t>(c)];
      const double val = xs(c) + alpha * (u(c) - xs(c));
      if (val > 1e-300 && !(u(c) < 0.0 && xs(c) / (xs(c) - u(c)) <= alpha)) {
        x(idx) = val;
        kept.push_back(idx);
      } else {
        x(idx) = 0.0;
      }
    }
    support.swap(kept);
  }
  return false;
}

}  // namespace

QPSolution solve_weighted_qp(const MomentMap& map, const Eigen::VectorXd& target,
                             const Eigen::VectorXd& row_weights, const SolverOptions& options,
                             const std::optional<Eigen::VectorXd>& init) {
  if (target.size() != map.rows() || row_weights.size() != map.rows()) {
    throw std::invalid_argument("solve_weighted_qp: size mismatch");
  }
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("solve_weighted_qp: tolerance must be > 0");
  const Eigen::Index n = map.cols();
  Eigen::VectorXd x0 = init ? simplex_project(*init)
                            : Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

  QPSolution out;
  const double gram = options.gram_norm > 0.0
                         ? options.gram_norm
                         : gram_norm_estimate(map, row_weights, options.power_iters);
  out.lipschitz = 2.0 * options.lipschitz_headroom * gram;
  if (!(out.lipschitz > 0.0)) out.lipschitz = 1.0;

  auto eval = [&](const Eigen::VectorXd& az, Eigen::VectorXd* dual) {
    const Eigen::ArrayXd res = (az - target).array();
    if (dual) *dual = (2.0 * row_weights.array() * res).matrix();
    return (row_weights.array() * res.square()).sum();
  };
  int stalled = 0;
  bool hit_floor = false;
  auto stop = [&](double f_old, double f, const Eigen::VectorXd&) {
    if (f <= options.objective_floor) {
      hit_floor = true;
      return true;
    }
    if (!std::isfinite(f_old)) return false;
    if (f_old - f <= options.tolerance * std::max(f_old, options.objective_floor)) {
      ++stalled;
    } else {
      stalled = 0;
    }
    return stalled >= options.stall_window;
  };
  FistaState s = fista_simplex(map, eval, out.lipschitz, std::move(x0),
                               options.resolved_max_iters(n), stop);
  out.weights = std::move(s.x);
  out.objective = s.f;
  out.iterations = s.iterations;
  out.converged = s.stopped;

  if (options.polish && !hit_floor) {
    Eigen::VectorXd polished = out.weights;
    const bool kkt = polish_active_set(map, target, row_weights, options, polished);
    polished = polished.cwiseMax(0.0);
    polished /= polished.sum();
    const double f = weighted_objective(map, target, row_weights, polished);
    if (f <= out.objective) {
      out.weights = std::move(polished);
      out.objective = f;
      out.polished = true;
      out.converged = out.converged || kkt;
    }
  }
  return out;
}

RecoveryConfig RecoveryConfig::for_degree(int k) {
  if (k < 1) throw std::invalid_argument("RecoveryConfig: k must be >= 1");
  RecoveryConfig cfg;
  cfg.k = k;
  cfg.g = static_cast<int>(std::ceil(std::pow(static_cast<double>(k), 1.5) - 1e-9));
  cfg.g = std::max(cfg.g, k);
  return cfg;
}

RecoveryConfig RecoveryConfig::for_spectral(int k) {
  if (k < 1) throw std::invalid_argument("RecoveryConfig: k must be >= 1");
  RecoveryConfig cfg;
  cfg.k = k;
  const double kd = static_cast<double>(k);
  cfg.g = static_cast<int>(std::ceil(std::pow(kd, 1.5) * std::sqrt(1.0 + std::log(kd)) - 1e-9));
  cfg.g = std::max(cfg.g, k);
  return cfg;
}

void RecoveryConfig::validate() const {
  if (k < 1) throw std::invalid_argument("RecoveryConfig: k must be >= 1");
  if (g < k) throw std::invalid_argument("RecoveryConfig: g must be >= k");
  if (!(solver.tolerance > 0.0)) throw std::invalid_argument("RecoveryConfig: tolerance must be > 0");
}

Eigen::VectorXd inverse_square_weights(int k) {
  Eigen::VectorXd w(k);
  for (int j = 1; j <= k; ++j) w(j - 1) = 1.0 / (static_cast<double>(j) * j);
  return w;
}

namespace {

void require_plain(const MomentVector& m, int k, const char* who) {
  if (m.basis != ChebBasis::kPlain) {
    throw std::invalid_argument(std::string(who) + ": moments must use the plain basis");
  }
  if (m.degree() != k) throw std::invalid_argument(std::string(who) + ": moment count != k");
  if (!m.values.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite moment");
}

}  // namespace

QPSolution solve_weighted_qp(const MomentVector& m, const RecoveryConfig& cfg) {
  cfg.validate();
  require_plain(m, cfg.k, "solve_weighted_qp");
  const ChebyshevMomentMap map(chebyshev_nodes(cfg.g), cfg.k);
  return solve_weighted_qp(map, m.values, inverse_square_weights(cfg.k), cfg.solver);
}

RecoveryResult recover_distribution(const MomentVector& m, const RecoveryConfig& cfg) {
  cfg.validate();
  require_plain(m, cfg.k, "recover_distribution");
  const Eigen::VectorXd nodes = chebyshev_nodes(cfg.g);
  const ChebyshevMomentMap map(nodes, cfg.k);
  RecoveryResult out;
  out.g = cfg.g;
  out.solution = solve_weighted_qp(map, m.values, inverse_square_weights(cfg.k), cfg.solver);
  out.distribution = DiscreteDistribution::on_line(nodes, out.solution.weights).pruned();
  out.report = moment_error_gamma(cheb_moments(out.distribution, cfg.k, ChebBasis::kPlain), m);
  return out;
}

RecoveryResult recover_distribution(const MomentVector& m, int k) {
  return recover_distribution(m, RecoveryConfig::for_degree(k));
}

LpResult solve_moment_lp(const MomentMap& map, const Eigen::VectorXd& target,
                         const Eigen::VectorXd& tol, const SolverOptions& options) {
  if (target.size() != map.rows() || tol.size() != map.rows()) {
    throw std::invalid_argument("solve_moment_lp: size mismatch");
  }
  if (!(tol.array() > 0.0).all()) throw std::invalid_argument("solve_moment_lp: tol_j must be > 0");
  // Aim for a band slightly narrower than requested so the hinge reaches zero
  // in finitely many steps whenever the band has interior.
  constexpr double kShrink = 1.0 - 1e-3;
  const Eigen::ArrayXd inner = tol.array() * kShrink;
  const Eigen::Index n = map.cols();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(map.rows());
  const double lipschitz =
      2.0 * options.lipschitz_headroom * gram_norm_estimate(map, ones, options.power_iters);

  auto violation = [&](const Eigen::VectorXd& az) {
    return ((az - target).array().abs() - tol.array()).maxCoeff();
  };
  auto eval = [&](const Eigen::VectorXd& az, Eigen::VectorXd* dual) {
    const Eigen::ArrayXd res = (az - target).array();
    const Eigen::ArrayXd excess = (res.abs() - inner).max(0.0);
    if (dual) *dual = (2.0 * res.sign() * excess).matrix();
    return excess.square().sum();
  };
  auto stop = [&](double, double, const Eigen::VectorXd& az) { return violation(az) <= 0.0; };

  FistaState s = fista_simplex(map, eval, lipschitz > 0.0 ? lipschitz : 1.0,
                               Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)),
                               options.resolved_max_iters(n), stop);
  LpResult out;
  out.weights = std::move(s.x);
  out.max_violation = violation(s.ax);
  out.feasible = out.max_violation <= 1e-9;
  out.iterations = s.iterations;
  return out;
}

LpResult solve_moment_lp(const MomentVector& m, const Eigen::VectorXd& tol,
                         const RecoveryConfig& cfg) {
  cfg.validate();
  require_plain(m, cfg.k, "solve_moment_lp");
  const Eigen::VectorXd nodes = chebyshev_nodes(cfg.g);
  const ChebyshevMomentMap map(nodes, cfg.k);
  LpResult out = solve_moment_lp(map, m.values, tol, cfg.solver);
  out.distribution = DiscreteDistribution::on_line(nodes, out.weights).pruned();
  return out;
}

}  // namespace momentforge
