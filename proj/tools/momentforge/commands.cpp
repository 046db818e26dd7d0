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

#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "momentforge/dp_synth.hpp"
#include "momentforge/experiment.hpp"
#include "momentforge/io.hpp"
#include "momentforge/popmle.hpp"
#include "momentforge/recovery.hpp"
#include "momentforge/sde.hpp"

namespace momentforge::cli {
namespace {

using nlohmann::json;

void write_report(const std::string& path, const RunManifest& manifest, json body) {
  if (path.empty()) return;
  json doc;
  doc["manifest"] = manifest.to_json();
  doc["result"] = std::move(body);
  write_file(path, doc.dump(2) + "\n");
}

// Readers outside io throw plain runtime_error; those are input problems too.
template <typename F>
auto as_io(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const IoError&) {
    throw;
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int cmd_recover(const RecoverArgs& a) {
  RunManifest manifest;
  manifest.subcommand = "recover";
  manifest.add_input(a.moments, read_file(a.moments));
  MomentVector m = read_moments_csv(a.moments);
  const int k = a.k > 0 ? a.k : m.degree();
  if (k > m.degree())
    throw std::invalid_argument("--k " + std::to_string(k) + " exceeds the " + std::to_string(m.degree()) +
                                " moments in " + a.moments);
  m.values.conservativeResize(k);
  const RecoveryConfig cfg = RecoveryConfig::for_degree(k);
  manifest.parameters = {{"k", k}, {"g", cfg.g}, {"tolerance", cfg.solver.tolerance}};

  const RecoveryResult res = recover_distribution(m, cfg);
  write_distribution_csv(a.out, res.distribution);
  write_report(a.report, manifest,
               {{"k", k},
                {"g", res.g},
                {"support_size", res.distribution.size()},
                {"gamma", res.report.gamma},
                {"w1_bound", res.report.w1_bound},
                {"w1_bound_conjectured", res.report.w1_bound_conjectured},
                {"objective", res.solution.objective},
                {"iterations", res.solution.iterations},
                {"converged", res.solution.converged}});
  if (!res.solution.converged)
    throw NotConverged("moment regression hit its iteration cap; outputs were written");
  return kOk;
}

int cmd_dp_synth(const DpSynthArgs& a) {
  RunManifest manifest;
  manifest.subcommand = "dp-synth";
  manifest.seed = a.seed;
  manifest.add_input(a.data, read_file(a.data));
  const Eigen::MatrixXd all = read_dataset_csv(a.data);
  if (a.column + a.dim > all.cols())
    throw UsageError("--column " + std::to_string(a.column) + " --dim " + std::to_string(a.dim) + " needs " +
                     std::to_string(a.column + a.dim) + " columns, " + a.data + " has " +
                     std::to_string(all.cols()));
  Eigen::MatrixXd data = all.middleCols(a.column, a.dim);
  if (a.rescale) data = rescale_to_unit(data);
  const long n = data.rows();

  DpConfig cfg;
  cfg.seed = a.seed;
  cfg.budget.epsilon = a.epsilon;
  cfg.budget.delta = a.delta > 0.0 ? a.delta : 1.0 / (double(n) * double(n));
  manifest.parameters = {{"column", a.column},
                         {"dim", a.dim},
                         {"rescale", a.rescale},
                         {"epsilon", cfg.budget.epsilon},
                         {"delta", cfg.budget.delta},
                         {"k_factor", cfg.k_factor},
                         {"grid_factor", cfg.grid_factor},
                         {"max_iters", cfg.solver.max_iters}};

  const DpResult res = a.dim == 1 ? dp_synthesize(data.col(0), cfg) : dp_synthesize_multi(data, cfg);
  write_distribution_csv(a.out, res.distribution);

  if (!a.release.empty()) {
    std::ostringstream csv;
    if (a.dim == 1) {
      csv << "j,value,variance\n";
      for (Eigen::Index j = 0; j < res.noisy.values.size(); ++j)
        csv << j + 1 << ',' << json(res.noisy.values(j)).dump() << ',' << json(res.noisy.variances(j)).dump()
            << '\n';
    } else {
      for (int c = 0; c < a.dim; ++c) csv << 'k' << c + 1 << ',';
      csv << "value,variance\n";
      const auto idx = multi_indices(res.report.k, a.dim);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (int c = 0; c < a.dim; ++c) csv << idx[i][c] << ',';
        csv << json(res.noisy.values(i)).dump() << ',' << json(res.noisy.variances(i)).dump() << '\n';
      }
    }
    write_file(a.release, csv.str());
  }

  const DpReport& r = res.report;
  json body = {{"n", r.n},
               {"dim", r.dim},
               {"k", r.k},
               {"cells", r.cells},
               {"grid_points_per_axis", r.r},
               {"sigma2", r.sigma2},
               {"clamped", r.clamped},
               {"gamma", r.gamma},
               {"rounding_bound", r.rounding_bound},
               {"objective", r.objective},
               {"iterations", r.iterations},
               {"converged", r.converged}};
  if (a.dim == 1) {
    body["expected_bound"] = r.expected_bound;
    body["hp_bound_beta05"] = r.hp_bound_beta05;
  } else {
    body["normsum"] = r.normsum;
  }
  if (a.evaluate) {
    if (a.dim != 1) throw UsageError("--evaluate is only available for --dim 1");
    const Eigen::MatrixXd clamped = data.cwiseMax(-1.0).cwiseMin(1.0);
    body["w1_to_input"] = w1_distance(res.distribution, DiscreteDistribution::uniform(clamped));
  }
  if (r.clamped > 0)
    std::fprintf(stderr, "warning: %ld input values were outside [-1, 1] and were clamped\n", r.clamped);
  write_report(a.report, manifest, std::move(body));
  return kOk;
}

int cmd_sde(const SdeArgs& a) {
  RunManifest manifest;
  manifest.subcommand = "sde";
  manifest.seed = a.seed;
  const std::string contents = read_file(a.matrix);
  manifest.add_input(a.matrix, contents);

  std::unique_ptr<LinearOperator> op;
  std::istringstream in(contents);
  double asym = 0.0, scale = 0.0;
  if (ends_with(a.matrix, ".mtx")) {
    Eigen::SparseMatrix<double> s = as_io(a.matrix, [&] { return read_matrix_market(in); });
    const Eigen::SparseMatrix<double> st = s.transpose();
    asym = (s - st).norm();
    scale = s.norm();
    op = std::make_unique<SparseOperator>(std::move(s));
  } else {
    Eigen::MatrixXd d = as_io(a.matrix, [&] { return read_dense_csv(in); });
    asym = (d - d.transpose()).norm();
    scale = d.norm();
    op = std::make_unique<DenseOperator>(std::move(d));
  }
  if (asym > 1e-12 * std::max(1.0, scale))
    throw std::invalid_argument(a.matrix + " is not symmetric (||A - A^T||_F = " + std::to_string(asym) + ")");

  SdeConfig cfg;
  cfg.epsilon = a.epsilon;
  cfg.delta = a.delta;
  cfg.C = a.C;
  cfg.c_hat = a.c_hat;
  cfg.seed = a.seed;
  cfg.allow_exact = !a.no_exact;
  manifest.parameters = {{"epsilon", cfg.epsilon}, {"delta", cfg.delta},     {"C", cfg.C},
                         {"c_hat", cfg.c_hat},     {"allow_exact", cfg.allow_exact}};

  const SdeResult res = estimate_spectral_density(*op, cfg);
  write_distribution_csv(a.out, res.distribution);
  const SdeReport& r = res.report;
  write_report(a.report, manifest,
               {{"n", r.n},
                {"S", r.S},
                {"k", r.k},
                {"gamma", r.gamma},
                {"alpha", r.alpha},
                {"g", r.g},
                {"matvecs", r.matvecs},
                {"planned_matvecs", r.planned_matvecs},
                {"budget_formula", r.budget_formula_value},
                {"lower_bound_floor", r.lower_bound_floor},
                {"w1_target", cfg.epsilon * r.S},
                {"exact_path", r.exact_path},
                {"lp_feasible", r.lp_feasible},
                {"tolerance_doubled", r.tolerance_doubled},
                {"lp_max_violation", r.lp_max_violation},
                {"lp_iterations", r.lp_iterations}});
  if (!r.lp_feasible) throw NotConverged("moment LP found no feasible point; outputs were written");
  return kOk;
}

int cmd_popmle(const PopmleArgs& a) {
  RunManifest manifest;
  manifest.subcommand = "popmle";
  manifest.add_input(a.obs, read_file(a.obs));
  const std::vector<int> obs = read_counts_csv(a.obs);
  EmOptions opt;
  opt.grid_size = a.grid;
  opt.tolerance = a.tol;
  opt.max_iters = a.max_iters;
  manifest.parameters = {{"t", a.t}, {"grid", opt.grid_size}, {"tolerance", opt.tolerance},
                         {"max_iters", opt.max_iters}};

  const Fingerprint fp = fingerprint(obs, a.t);
  const NpmleResult res = npmle_em(fp, opt);
  write_distribution_csv(a.out, res.distribution);
  json body = {{"N", fp.N},
               {"t", fp.t},
               {"fingerprint", fp.counts},
               {"support_size", res.distribution.size()},
               {"log_likelihood", res.loglik_trace.empty() ? 0.0 : res.loglik_trace.back()},
               {"iterations", res.iterations},
               {"converged", res.converged},
               {"degenerate", res.degenerate},
               {"optimality_gap", res.optimality_gap},
               {"log_likelihood_trace", res.loglik_trace},
               {"naive_rate", 1.0 / std::sqrt(double(a.t))}};
  if (!a.truth.empty()) {
    manifest.add_input(a.truth, read_file(a.truth));
    const DiscreteDistribution truth = read_distribution_csv(a.truth);
    body["w1_mle"] = w1_unit_interval(res.distribution, truth);
    body["w1_naive"] = w1_unit_interval(naive_estimator(obs, a.t), truth);
  }
  write_report(a.report, manifest, std::move(body));
  if (!res.converged) throw NotConverged("EM hit its iteration cap; outputs were written");
  return kOk;
}

int cmd_experiment_dp(const ExperimentDpArgs& a) {
  RunManifest manifest;
  manifest.subcommand = "experiment-dp";
  manifest.seed = a.seed;
  DpSweepConfig cfg;
  cfg.generator = parse_generator(a.dist);
  cfg.n_min = a.nmin;
  cfg.n_max = a.nmax;
  cfg.trials = a.trials;
  cfg.epsilon = a.epsilon;
  cfg.delta = a.delta;
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  cfg.sizes();  // validates the range before any work
  // jobs only changes scheduling, never output, so it stays out of the manifest
  manifest.parameters = {{"dist", a.dist},       {"nmin", a.nmin},       {"nmax", a.nmax},
                         {"trials", a.trials},   {"epsilon", a.epsilon}, {"delta", a.delta > 0 ? json(a.delta) : json("1/n^2")},
                         {"max_iters", cfg.solver.max_iters}};

  const std::vector<DpSweepRow> rows = run_dp_sweep(cfg);
  const std::string csv = sweep_csv(rows);
  if (a.out.empty())
    std::cout << csv;
  else
    write_file(a.out, csv);

  json means = json::array();
  for (const auto& [n, w] : mean_w1_by_n(rows))
    means.push_back({{"n", n}, {"mean_w1", w}, {"expected_bound", expected_error_curve(n, cfg.epsilon, cfg.delta_for(n))}});
  write_report(a.report, manifest, {{"rows", rows.size()}, {"mean_w1_by_n", means}, {"loglog_slope", rows.size() > 1 && cfg.n_min < cfg.n_max ? json(loglog_slope(rows)) : json(nullptr)}});
  return kOk;
}

}  // namespace momentforge::cli
