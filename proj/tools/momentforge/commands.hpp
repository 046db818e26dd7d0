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

#ifndef MOMENTFORGE_TOOLS_COMMANDS_HPP_
#define MOMENTFORGE_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace momentforge::cli {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kValidation = 3, kNotConverged = 4 };

// The run finished and wrote its outputs, but a solver stopped short.
class NotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flag combinations that the parser cannot see.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RecoverArgs {
  std::string moments, out, report;
  int k = 0;  // 0: all moments in the file
};

struct DpSynthArgs {
  std::string data, out, report, release;
  int column = 0;
  int dim = 1;
  bool rescale = false;
  bool evaluate = false;
  double epsilon = 0.5;
  double delta = 0.0;  // 0: 1/n^2
  std::uint64_t seed = 0;
};

struct SdeArgs {
  std::string matrix, out, report;
  double epsilon = 0.1;
  double delta = 0.1;
  double C = 16.0;
  double c_hat = 80.0;
  bool no_exact = false;
  std::uint64_t seed = 0;
};

struct PopmleArgs {
  std::string obs, out, report, truth;
  int t = 0;
  int grid = 1000;
  double tol = 1e-9;
  long max_iters = 100000;
};

struct ExperimentDpArgs {
  std::string dist = "gaussian";
  std::string out, report;
  long nmin = 128;
  long nmax = 8192;
  int trials = 10;
  int jobs = 1;
  double epsilon = 0.5;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

int cmd_recover(const RecoverArgs& a);
int cmd_dp_synth(const DpSynthArgs& a);
int cmd_sde(const SdeArgs& a);
int cmd_popmle(const PopmleArgs& a);
int cmd_experiment_dp(const ExperimentDpArgs& a);
// suite: decay, jackson, orthogonality or all.  Prints one line per check.
int cmd_verify(const std::string& suite);

}  // namespace momentforge::cli

#endif  // MOMENTFORGE_TOOLS_COMMANDS_HPP_
