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

#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "momentforge/io.hpp"

namespace cli = momentforge::cli;

int main(int argc, char** argv) {
  CLI::App app{"Distribution recovery from Chebyshev moments"};
  app.set_version_flag("--version", momentforge::library_version());
  app.require_subcommand(1);

  cli::RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "Recover a distribution from Chebyshev moments");
  recover->add_option("--moments", rec.moments, "CSV with header j,m")->required();
  recover->add_option("--k", rec.k, "Use the first k moments (default: all)")->check(CLI::PositiveNumber);
  recover->add_option("--out", rec.out, "Output distribution CSV")->required();
  recover->add_option("--report", rec.report, "JSON report");

  cli::DpSynthArgs dp;
  auto* dp_synth = app.add_subcommand("dp-synth", "Differentially private synthetic distribution");
  dp_synth->add_option("--data", dp.data, "Numeric CSV, one point per row")->required();
  dp_synth->add_option("--column", dp.column, "First column to read (0-based)")->check(CLI::NonNegativeNumber);
  dp_synth->add_option("--dim", dp.dim, "Number of columns, 1 to 3")->check(CLI::Range(1, 3));
  dp_synth->add_flag("--rescale", dp.rescale, "Map each column affinely onto [-1, 1] first");
  dp_synth->add_option("--epsilon", dp.epsilon, "Privacy epsilon in (0, 1]");
  dp_synth->add_option("--delta", dp.delta, "Privacy delta (default 1/n^2)");
  dp_synth->add_option("--seed", dp.seed, "Noise seed")->envname("MOMENTFORGE_SEED");
  dp_synth->add_option("--out", dp.out, "Output distribution CSV")->required();
  dp_synth->add_option("--release", dp.release, "Also write the noisy moments (CSV)");
  dp_synth->add_option("--report", dp.report, "JSON report");
  dp_synth->add_flag("--evaluate", dp.evaluate, "Report W1 to the (rescaled) input, 1-D only");

  cli::SdeArgs sd;
  auto* sde = app.add_subcommand("sde", "Spectral density of a symmetric matrix");
  sde->add_option("--matrix", sd.matrix, "Matrix Market (.mtx) or dense CSV")->required();
  sde->add_option("--eps", sd.epsilon, "Accuracy, W1 <= eps * S");
  sde->add_option("--delta", sd.delta, "Failure probability");
  sde->add_option("--C", sd.C, "Probe schedule constant");
  sde->add_option("--c-hat", sd.c_hat, "Degree constant, k = ceil(c_hat / eps)");
  sde->add_flag("--no-exact", sd.no_exact, "Never switch to the exact eigenvalue path");
  sde->add_option("--seed", sd.seed, "Probe seed")->envname("MOMENTFORGE_SEED");
  sde->add_option("--out", sd.out, "Output distribution CSV")->required();
  sde->add_option("--report", sd.report, "JSON report");

  cli::PopmleArgs pm;
  auto* popmle = app.add_subcommand("popmle", "Mixing distribution of coin biases by NPMLE");
  popmle->add_option("--obs", pm.obs, "Head counts, one per row")->required();
  popmle->add_option("--t", pm.t, "Tosses per coin")->required()->check(CLI::PositiveNumber);
  popmle->add_option("--grid", pm.grid, "EM grid size")->check(CLI::Range(2, 1000000));
  popmle->add_option("--tol", pm.tol, "Stop when the per-coin log-likelihood gain drops below this");
  popmle->add_option("--max-iters", pm.max_iters, "EM iteration cap")->check(CLI::PositiveNumber);
  popmle->add_option("--out", pm.out, "Output distribution CSV")->required();
  popmle->add_option("--report", pm.report, "JSON report");
  popmle->add_option("--truth", pm.truth, "True distribution CSV on [0, 1], for W1 in the report");

  cli::ExperimentDpArgs ex;
  auto* experiment = app.add_subcommand("experiment-dp", "DP scaling study on synthetic generators");
  experiment->add_option("--dist", ex.dist, "Generator")->check(CLI::IsMember({"gaussian", "sine", "powerlaw"}));
  experiment->add_option("--nmin", ex.nmin, "Smallest n (power of two)")->check(CLI::PositiveNumber);
  experiment->add_option("--nmax", ex.nmax, "Largest n (power of two)")->check(CLI::PositiveNumber);
  experiment->add_option("--trials", ex.trials, "Trials per n")->check(CLI::PositiveNumber);
  experiment->add_option("--jobs", ex.jobs, "Worker threads")->check(CLI::PositiveNumber);
  experiment->add_option("--epsilon", ex.epsilon, "Privacy epsilon");
  experiment->add_option("--delta", ex.delta, "Privacy delta (default 1/n^2)");
  experiment->add_option("--seed", ex.seed, "Base seed")->envname("MOMENTFORGE_SEED");
  experiment->add_option("--out", ex.out, "CSV path (default stdout)");
  experiment->add_option("--report", ex.report, "JSON summary");

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "Run the built-in invariant checks");
  verify->add_option("--suite", suite, "Which checks")
      ->check(CLI::IsMember({"decay", "jackson", "orthogonality", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  try {
    if (*recover) return cli::cmd_recover(rec);
    if (*dp_synth) return cli::cmd_dp_synth(dp);
    if (*sde) return cli::cmd_sde(sd);
    if (*popmle) return cli::cmd_popmle(pm);
    if (*experiment) return cli::cmd_experiment_dp(ex);
    if (*verify) return cli::cmd_verify(suite);
  } catch (const cli::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return cli::kUsage;
  } catch (const momentforge::IoError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return cli::kIo;
  } catch (const cli::NotConverged& e) {
    std::fprintf(stderr, "not converged: %s\n", e.what());
    return cli::kNotConverged;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return cli::kValidation;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return cli::kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kValidation;
  }
  return cli::kUsage;
}
