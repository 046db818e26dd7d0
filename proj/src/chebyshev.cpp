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

#include "momentforge/chebyshev.hpp"

#include <algorithm>
#include <cstdlib>

namespace momentforge {

Eigen::VectorXd chebyshev_nodes(int g) {
  if (g < 1) throw std::invalid_argument("chebyshev_nodes: g must be >= 1");
  Eigen::VectorXd nodes(g);
  const double pi = std::numbers::pi;
  for (int i = 1; i <= g; ++i) {
    nodes(i - 1) = std::cos((2.0 * i - 1.0) * pi / (2.0 * g));
  }
  // cos(pi/2) is 6e-17 in floating point; the middle node of an odd grid is 0.
  if (g % 2 == 1) nodes(g / 2) = 0.0;
  return nodes;
}

std::vector<std::int64_t> jackson_kernel_coeffs(int m) {
  if (m < 1) throw std::invalid_argument("jackson_kernel_coeffs: m must be >= 1");
  std::vector<std::int64_t> coeffs(static_cast<std::size_t>(2 * m - 1), 0);
  for (int k = 0; k <= 2 * m - 2; ++k) {
    std::int64_t sum = 0;
    for (int t = -m; t <= m - k; ++t) {
      sum += static_cast<std::int64_t>(m - std::abs(t)) * (m - std::abs(t + k));
    }
    coeffs[static_cast<std::size_t>(k)] = sum;
  }
  return coeffs;
}

bool JacksonDamping::monotone() const {
  if (kernel.empty() || kernel.front() <= 0) return false;
  for (std::size_t j = 1; j < kernel.size(); ++j) {
    if (kernel[j] > kernel[j - 1] || kernel[j] < 0) return false;
  }
  return true;
}

JacksonDamping jackson_damping(int k) {
  if (k < 1) throw std::invalid_argument("jackson_damping: k must be >= 1");
  JacksonDamping out;
  out.degree = k;
  out.kernel_half_degree = (k + 1) / 2 + 1;  // smallest m with 2m - 2 >= k
  out.kernel = jackson_kernel_coeffs(out.kernel_half_degree);
  out.factors.resize(k + 1);
  const double b0 = static_cast<double>(out.kernel.front());
  for (int j = 0; j <= k; ++j) {
    out.factors(j) = static_cast<double>(out.kernel[static_cast<std::size_t>(j)]) / b0;
  }
  return out;
}

ChebCoefficients ChebCoefficients::in_basis(ChebBasis target) const {
  if (target == basis) return *this;
  ChebCoefficients out{values, target};
  // <f w, Tbar_j> = <f w, T_j> * s_j, and the plain expansion coefficient is
  // <f w, T_j> / <T_j w, T_j> = <f w, T_j> * s_j^2.  So normalized = plain / s_j.
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const double s = normalized_scale<double>(static_cast<int>(j));
    out.values(j) = target == ChebBasis::kNormalized ? values(j) / s : values(j) * s;
  }
  return out;
}

double ChebCoefficients::operator()(double x) const {
  if (basis == ChebBasis::kPlain) return chebyshev_series(values, x);
  return chebyshev_series(in_basis(ChebBasis::kPlain).values, x);
}

ChebCoefficients cheb_interpolation_coeffs(const std::function<double(double)>& f,
                                           int degree) {
  if (degree < 0) throw std::invalid_argument("interpolation degree must be >= 0");
  const int n = degree + 1;
  const double pi = std::numbers::pi;
  Eigen::VectorXd fvals(n);
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) {
    theta(i) = (2.0 * i + 1.0) * pi / (2.0 * n);
    fvals(i) = f(std::cos(theta(i)));
    if (!std::isfinite(fvals(i))) {
      throw std::domain_error("cheb_interpolation_coeffs: non-finite f value");
    }
  }
  ChebCoefficients c{Eigen::VectorXd::Zero(n), ChebBasis::kPlain};
  for (int j = 0; j < n; ++j) {
    c.values(j) = (2.0 / n) * (fvals.array() * (j * theta.array()).cos()).sum();
  }
  c.values(0) *= 0.5;
  return c;
}

double decay_functional(const ChebCoefficients& c) {
  if (c.basis != ChebBasis::kNormalized) {
    throw std::invalid_argument("decay_functional expects normalized coefficients");
  }
  double sum = 0.0;
  for (Eigen::Index j = 1; j < c.values.size(); ++j) {
    const double t = static_cast<double>(j) * c.values(j);
    sum += t * t;
  }
  return sum;
}

ChebCoefficients damped(const ChebCoefficients& c, const JacksonDamping& damping) {
  const Eigen::Index len = std::min<Eigen::Index>(c.values.size(), damping.factors.size());
  ChebCoefficients out{c.values.head(len).cwiseProduct(damping.factors.head(len)), c.basis};
  return out;
}

MultiIndex::MultiIndex(std::vector<int> k) : k_(std::move(k)) {
  if (k_.empty() || k_.size() > 3) {
    throw std::invalid_argument("MultiIndex dimension must be 1, 2 or 3");
  }
  for (int v : k_) {
    if (v < 0) throw std::invalid_argument("MultiIndex entries must be >= 0");
    norm2_sq_ += static_cast<std::int64_t>(v) * v;
  }
}

int MultiIndex::nonzeros() const {
  return static_cast<int>(std::count_if(k_.begin(), k_.end(), [](int v) { return v != 0; }));
}

std::vector<MultiIndex> multi_indices(int m, int d) {
  if (m < 0 || d < 1 || d > 3) throw std::invalid_argument("multi_indices: bad m or d");
  std::vector<MultiIndex> out;
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  while (true) {
    // Advance odometer, last coordinate fastest.
    int pos = d - 1;
    while (pos >= 0 && k[static_cast<std::size_t>(pos)] == m) {
      k[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++k[static_cast<std::size_t>(pos)];
    out.emplace_back(k);
  }
  return out;
}

double chebyshev_t_multi(const MultiIndex& k, std::span<const double> x) {
  if (static_cast<int>(x.size()) != k.dim()) {
    throw std::invalid_argument("chebyshev_t_multi: dimension mismatch");
  }
  double prod = 1.0;
  for (int i = 0; i < k.dim(); ++i) prod *= chebyshev_t(k[i], x[static_cast<std::size_t>(i)]);
  return prod;
}

double normalized_scale_multi(const MultiIndex& k) {
  return std::sqrt(std::pow(2.0, k.nonzeros()) / std::pow(std::numbers::pi, k.dim()));
}

}  // namespace momentforge
