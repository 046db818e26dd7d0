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

#include "momentforge/sde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "momentforge/moment_map.hpp"
#include "momentforge/random.hpp"

namespace momentforge {

namespace {

constexpr std::uint64_t kPowerStream = 0;
constexpr std::uint64_t kProbeStream = 1;

}  // namespace

DenseOperator::DenseOperator(Eigen::MatrixXd a) : LinearOperator(a.rows()), a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw std::invalid_argument("DenseOperator: matrix must be square");
}

SparseOperator::SparseOperator(Eigen::SparseMatrix<double> a)
    : LinearOperator(a.rows()), a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw std::invalid_argument("SparseOperator: matrix must be square");
  a_.makeCompressed();
}

NormBound power_method_bound(const LinearOperator& op, int iters, std::uint64_t seed) {
  if (iters < 1) throw std::invalid_argument("power_method_bound: iters must be >= 1");
  const Eigen::Index n = op.size();
  SplitMix64 rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.rademacher();
  v /= std::sqrt(static_cast<double>(n));
  Eigen::VectorXd w;
  double best = 0.0;
  for (int it = 0; it < iters; ++it) {
    op.apply(v, w);
    const double norm = w.norm();
    best = std::max(best, norm);
    if (!(norm > 0.0)) break;
    v = w / norm;
  }
  NormBound out;
  if (!(best > 0.0)) {
    out.S = 1e-30;
    out.zero_operator = true;
    return out;
  }
  out.S = 2.0 * best;
  return out;
}

int SdeConfig::k() const { return ceil_robust(c_hat / epsilon); }

void SdeConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("SdeConfig: epsilon must be in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("SdeConfig: delta must be in (0, 1)");
  if (!(C > 0.0) || !(c_hat > 0.0)) throw std::invalid_argument("SdeConfig: C and c_hat must be > 0");
  if (k() < 1) throw std::invalid_argument("SdeConfig: k must be >= 1");
}

double SdeConfig::gamma() const {
  const double kd = k();
  return 1.0 / (kd * std::sqrt(1.0 + std::log(kd)));
}

double SdeConfig::alpha() const { return delta / k(); }

SolverOptions SdeConfig::default_solver() {
  SolverOptions o;
  o.max_iters = 20000;
  o.power_iters = 30;
  return o;
}

std::vector<long> probe_schedule(long n, int k, double C, double alpha, double gamma) {
  if (n < 1 || k < 1) throw std::invalid_argument("probe_schedule: n and k must be >= 1");
  const double l2 = std::pow(std::log(1.0 / alpha), 2);
  std::vector<long> out(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) {
    const double v = 1.0 + C * l2 / (static_cast<double>(n) * j * gamma * gamma);
    out[static_cast<std::size_t>(j - 1)] = static_cast<long>(std::ceil(v));
  }
  return out;
}

long planned_matvecs(const std::vector<long>& schedule) {
  long total = 0;
  for (long l : schedule) total += l;
  return total;
}

HutchinsonResult hutchinson_cheb_moments(const LinearOperator& op, int k,
                                         const std::vector<long>& schedule, std::uint64_t seed) {
  if (static_cast<int>(schedule.size()) != k) throw std::invalid_argument("hutchinson: schedule size != k");
  for (std::size_t j = 1; j < schedule.size(); ++j) {
    if (schedule[j] > schedule[j - 1]) throw std::invalid_argument("hutchinson: schedule must be nonincreasing");
  }
  const Eigen::Index n = op.size();
  const long before = op.matvec_count();
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd g(n), prev, cur, next;
  int degree = k;
  for (long i = 0; i < schedule.front(); ++i) {
    while (degree > 0 && schedule[static_cast<std::size_t>(degree - 1)] <= i) --degree;
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    for (Eigen::Index t = 0; t < n; ++t) g(t) = rng.rademacher();
    prev = g;
    op.apply(g, cur);
    sums(0) += g.dot(cur);
    for (int j = 2; j <= degree; ++j) {
      op.apply(cur, next);
      next = 2.0 * next - prev;
      sums(j - 1) += g.dot(next);
      prev.swap(cur);
      cur.swap(next);
    }
  }
  HutchinsonResult out;
  out.schedule = schedule;
  out.moments.basis = ChebBasis::kPlain;
  out.moments.values.resize(k);
  for (int j = 1; j <= k; ++j) {
    out.moments.values(j - 1) =
        sums(j - 1) / (static_cast<double>(schedule[static_cast<std::size_t>(j - 1)]) * static_cast<double>(n));
  }
  out.matvecs = op.matvec_count() - before;
  return out;
}

HutchinsonResult hutchinson_cheb_moments(const LinearOperator& op, const SdeConfig& cfg) {
  cfg.validate();
  const int k = cfg.k();
  const auto schedule = probe_schedule(static_cast<long>(op.size()), k, cfg.C, cfg.alpha(), cfg.gamma());
  return hutchinson_cheb_moments(op, k, schedule, derive_seed(cfg.seed, kProbeStream));
}

double sde_budget_formula(long n, double epsilon, double delta) {
  const double l1 = std::log(1.0 / epsilon);
  const double l2 = std::log(1.0 / (epsilon * delta));
  const double v = (1.0 / epsilon) * (1.0 + l1 * l1 * l2 * l2 / (static_cast<double>(n) * epsilon));
  return std::min(static_cast<double>(n), v);
}

namespace {

DiscreteDistribution uniform_on_line(const Eigen::VectorXd& values) {
  const double scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  if (!(scale > 0.0)) return DiscreteDistribution::uniform(Eigen::MatrixXd::Zero(values.size(), 1));
  Eigen::MatrixXd pts = values / scale;
  return DiscreteDistribution::uniform(pts.cwiseMax(-1.0).cwiseMin(1.0)).affine(scale, 0.0);
}

}  // namespace

SdeResult estimate_spectral_density(const LinearOperator& op, const SdeConfig& cfg) {
  cfg.validate();
  const long n = static_cast<long>(op.size());
  if (n < 1) throw std::invalid_argument("estimate_spectral_density: empty operator");
  const long before = op.matvec_count();
  SdeResult out;
  SdeReport& rep = out.report;
  rep.n = n;
  rep.k = cfg.k();
  rep.gamma = cfg.gamma();
  rep.alpha = cfg.alpha();
  const auto schedule = probe_schedule(n, rep.k, cfg.C, rep.alpha, rep.gamma);
  rep.planned_matvecs = planned_matvecs(schedule);
  rep.budget_formula_value = sde_budget_formula(n, cfg.epsilon, cfg.delta);
  rep.lower_bound_floor = 1.0 / cfg.epsilon;

  if (cfg.allow_exact && rep.planned_matvecs >= n) {
    // Cheaper to read A column by column than to estimate its moments.
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n), col;
    for (long i = 0; i < n; ++i) {
      e(i) = 1.0;
      op.apply(e, col);
      a.col(i) = col;
      e(i) = 0.0;
    }
    a = 0.5 * (a + a.transpose()).eval();
    const Eigen::VectorXd lambda = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
    out.distribution = uniform_on_line(lambda);
    rep.exact_path = true;
    rep.S = lambda.cwiseAbs().maxCoeff();
    rep.matvecs = op.matvec_count() - before;
    return out;
  }

  const int iters = cfg.power_iters > 0
                        ? cfg.power_iters
                        : std::max(1, static_cast<int>(std::ceil(10.0 * std::log(static_cast<double>(n)))));
  const NormBound nb = power_method_bound(op, iters, derive_seed(cfg.seed, kPowerStream));
  rep.S = nb.S;
  if (nb.zero_operator) {
    out.distribution = DiscreteDistribution::point_mass(0.0);
    rep.matvecs = op.matvec_count() - before;
    return out;
  }
  const ScaledOperator scaled(op, 1.0 / nb.S);
  const HutchinsonResult hutch =
      hutchinson_cheb_moments(scaled, rep.k, schedule, derive_seed(cfg.seed, kProbeStream));

  RecoveryConfig rc = RecoveryConfig::for_spectral(rep.k);
  rc.solver = cfg.solver;
  rep.g = rc.g;
  Eigen::VectorXd tol(rep.k);
  for (int j = 1; j <= rep.k; ++j) {
    tol(j - 1) = std::sqrt(static_cast<double>(j)) * rep.gamma +
                 j * std::sqrt(2.0 * std::numbers::pi) / static_cast<double>(rc.g);
  }
  LpResult lp = solve_moment_lp(hutch.moments, tol, rc);
  if (!lp.feasible) {
    std::clog << "sde: moment LP infeasible at max violation " << lp.max_violation
              << "; retrying with doubled tolerances\n";
    rep.tolerance_doubled = true;
    const long first = lp.iterations;
    lp = solve_moment_lp(hutch.moments, 2.0 * tol, rc);
    lp.iterations += first;
  }
  rep.lp_feasible = lp.feasible;
  rep.lp_max_violation = lp.max_violation;
  rep.lp_iterations = lp.iterations;
  out.distribution = lp.distribution.affine(nb.S, 0.0);
  rep.matvecs = op.matvec_count() - before;
  return out;
}

Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& input) {
  const Eigen::Index n = input.rows();
  if (input.cols() != n) throw std::invalid_argument("jacobi_eigenvalues: matrix must be square");
  if (n > 2048) throw std::invalid_argument("jacobi_eigenvalues: n must be <= 2048");
  if (n > 0 && (input - input.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("jacobi_eigenvalues: matrix is not symmetric");
  }
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  const double scale = std::max(a.norm(), 1e-300);
  auto off_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < 100 && off_norm() > 1e-10 * scale; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Symmetric Schur decomposition of the 2x2 block.
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
      }
    }
  }
  Eigen::VectorXd ev = a.diagonal();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

DiscreteDistribution exact_spectral_density(const Eigen::MatrixXd& a) {
  return uniform_on_line(jacobi_eigenvalues(a));
}

Eigen::SparseMatrix<double> read_matrix_market(std::istream& in) {
  std::string line;
  long line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("matrix market line " + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line)) fail("empty input");
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
  };
  if (banner != "%%MatrixMarket" || lower(object) != "matrix") fail("missing %%MatrixMarket matrix banner");
  if (lower(format) != "coordinate") fail("only coordinate format is supported");
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "pattern") fail("unsupported field " + field);
  if (symmetry != "general" && symmetry != "symmetric") fail("unsupported symmetry " + symmetry);
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz) || rows < 1 || cols < 1 || nnz < 0) fail("bad size line");
    break;
  }
  if (rows < 0) fail("missing size line");
  if (rows != cols) fail("matrix must be square");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  long seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long i = 0, j = 0;
    double v = 1.0;
    if (!(entry >> i >> j)) fail("bad entry");
    if (!pattern && !(entry >> v)) fail("missing value");
    if (i < 1 || i > rows || j < 1 || j > cols) fail("index out of range");
    if (!std::isfinite(v)) fail("non-finite value");
    triplets.emplace_back(i - 1, j - 1, v);
    if (symmetric && i != j) triplets.emplace_back(j - 1, i - 1, v);
    ++seen;
  }
  if (seen != nnz) fail("expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
  Eigen::SparseMatrix<double> a(rows, cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Eigen::SparseMatrix<double> read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_matrix_market(in);
}

Eigen::MatrixXd read_dense_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw std::runtime_error("dense csv line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw std::runtime_error("dense csv: matrix must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return a;
}

}  // namespace momentforge
