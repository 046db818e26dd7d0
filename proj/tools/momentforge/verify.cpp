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

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "commands.hpp"
#include "momentforge/chebyshev.hpp"

namespace momentforge::cli {
namespace {

using Fn = std::function<double(double)>;

bool report(const char* suite, const char* check, bool ok, const std::string& detail) {
  std::printf("%-14s %-34s %s  %s\n", suite, check, ok ? "PASS" : "FAIL", detail.c_str());
  return ok;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double decay_of(const Fn& f) {
  return decay_functional(cheb_interpolation_coeffs(f, 200).in_basis(ChebBasis::kNormalized));
}

bool suite_decay() {
  const double half_pi = std::numbers::pi / 2.0;
  const double id = decay_of([](double x) { return x; });
  bool ok = report("decay", "f(x) = x attains pi/2", std::abs(id - half_pi) <= 1e-8,
                   fmt("%.12f vs pi/2 = %.12f", id, half_pi));
  const std::vector<std::pair<const char*, Fn>> fs = {
      {"sin(x)", [](double x) { return std::sin(x); }},
      {"x^2 / 2", [](double x) { return 0.5 * x * x; }},
      {"tanh(x)", [](double x) { return std::tanh(x); }},
      {"cos(3x) / 3", [](double x) { return std::cos(3.0 * x) / 3.0; }},
  };
  for (const auto& [name, f] : fs) {
    const double v = decay_of(f);
    ok &= report("decay", (std::string(name) + " stays below pi/2").c_str(), v <= half_pi + 1e-9,
                 fmt("%.12f", v));
  }
  return ok;
}

bool suite_jackson() {
  bool ok = true;
  for (int k : {4, 16, 64, 256}) {
    const JacksonDamping d = jackson_damping(k);
    bool shape = d.monotone() && d.factors(0) == 1.0 && d.factors.minCoeff() >= 0.0;
    ok &= report("jackson", ("damping factors, k = " + std::to_string(k)).c_str(), shape,
                 fmt("b^1 = %.6f, b^k = %.3e", d.factors(1), d.factors(k)));
  }
  const std::vector<std::pair<const char*, Fn>> fs = {
      {"|x|", [](double x) { return std::abs(x); }},
      {"|x - 0.3|", [](double x) { return std::abs(x - 0.3); }},
      {"max(0, x)", [](double x) { return std::max(0.0, x); }},
  };
  const int samples = 4001;
  for (const auto& [name, f] : fs) {
    double worst = 0.0;
    for (int k : {8, 32, 128}) {
      const ChebCoefficients fk = damped(cheb_interpolation_coeffs(f, 4 * k), jackson_damping(k));
      double err = 0.0;
      for (int i = 0; i < samples; ++i) {
        const double x = -1.0 + 2.0 * i / (samples - 1);
        err = std::max(err, std::abs(f(x) - fk(x)));
      }
      worst = std::max(worst, err * k);
    }
    ok &= report("jackson", (std::string(name) + ": k ||f - f_k|| <= 18").c_str(), worst <= 18.0,
                 fmt("max %.4f", worst));
  }
  return ok;
}

bool suite_orthogonality() {
  // Gauss-Chebyshev quadrature on N nodes is exact below degree 2N.
  const int N = 64, K = 40;
  const Eigen::VectorXd nodes = chebyshev_nodes(N);
  double worst = 0.0;
  for (int i = 0; i <= K; ++i)
    for (int j = 0; j <= K; ++j) {
      double s = 0.0;
      for (int n = 0; n < N; ++n) s += chebyshev_t(i, nodes(n)) * chebyshev_t(j, nodes(n));
      s *= std::numbers::pi / N * normalized_scale<double>(i) * normalized_scale<double>(j);
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  bool ok = report("orthogonality", "normalized T_i, T_j inner products", worst <= 1e-12,
                   fmt("max deviation from identity %.2e", worst));
  double rec = 0.0;
  for (int j = 0; j <= 30; ++j)
    for (int n = 0; n <= 50; ++n) {
      const double x = -1.0 + n / 25.0;
      rec = std::max(rec, std::abs(chebyshev_t(j, x) - std::cos(j * std::acos(x))));
    }
  ok &= report("orthogonality", "recurrence matches cos(j arccos x)", rec <= 1e-12, fmt("max gap %.2e", rec));
  return ok;
}

}  // namespace

int cmd_verify(const std::string& suite) {
  bool ok = true;
  bool ran = false;
  if (suite == "decay" || suite == "all") ok &= suite_decay(), ran = true;
  if (suite == "jackson" || suite == "all") ok &= suite_jackson(), ran = true;
  if (suite == "orthogonality" || suite == "all") ok &= suite_orthogonality(), ran = true;
  if (!ran) throw UsageError("unknown suite '" + suite + "'");
  return ok ? kOk : kValidation;
}

}  // namespace momentforge::cli
