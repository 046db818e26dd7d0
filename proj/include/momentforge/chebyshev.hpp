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

#ifndef MOMENTFORGE_CHEBYSHEV_HPP_
#define MOMENTFORGE_CHEBYSHEV_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace momentforge {

// Basis convention for Chebyshev moments and coefficients.  kNormalized refers
// to the orthonormal basis Tbar_j = T_j / sqrt(<T_j w, T_j>), i.e. T_0/sqrt(pi)
// and T_j/sqrt(pi/2) for j >= 1, under the weight w(x) = 1/sqrt(1 - x^2).
enum class ChebBasis { kPlain, kNormalized };

inline const char* to_string(ChebBasis basis) {
  return basis == ChebBasis::kPlain ? "plain" : "normalized";
}

// Points this far outside [-1, 1] are clamped rather than rejected.
inline constexpr double kDomainSlack = 1e-12;

// Factor s_j with Tbar_j = s_j * T_j.
template <typename Scalar = double>
Scalar normalized_scale(int j) {
  using std::sqrt;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  return j == 0 ? Scalar(1) / sqrt(pi) : sqrt(Scalar(2) / pi);
}

template <typename Scalar>
Scalar clamp_to_unit(Scalar x) {
  using std::abs;
  if (!(abs(x) <= Scalar(1) + Scalar(kDomainSlack))) {
    throw std::domain_error("Chebyshev argument outside [-1, 1]: " +
                            std::to_string(static_cast<double>(x)));
  }
  if (x > Scalar(1)) return Scalar(1);
  if (x < Scalar(-1)) return Scalar(-1);
  return x;
}

// T_j(x) by the three-term recurrence.
template <typename Scalar>
Scalar chebyshev_t(int j, Scalar x) {
  if (j < 0) throw std::invalid_argument("Chebyshev degree must be >= 0");
  x = clamp_to_unit(x);
  if (j == 0) return Scalar(1);
  Scalar prev(1), cur = x;
  for (int i = 2; i <= j; ++i) {
    const Scalar next = Scalar(2) * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// U_j(x), second kind.  Only used to check T_j' = j U_{j-1}.
template <typename Scalar>
Scalar chebyshev_u(int j, Scalar x) {
  if (j < 0) throw std::invalid_argument("Chebyshev degree must be >= 0");
  x = clamp_to_unit(x);
  if (j == 0) return Scalar(1);
  Scalar prev(1), cur = Scalar(2) * x;
  for (int i = 2; i <= j; ++i) {
    const Scalar next = Scalar(2) * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Fills out[j] = T_j(x) for j = 0..out.size()-1.
template <typename Scalar>
void chebyshev_t_all(Scalar x, std::span<Scalar> out) {
  if (out.empty()) return;
  x = clamp_to_unit(x);
  out[0] = Scalar(1);
  if (out.size() > 1) out[1] = x;
  for (std::size_t j = 2; j < out.size(); ++j) {
    out[j] = Scalar(2) * x * out[j - 1] - out[j - 2];
  }
}

// Clenshaw summation of sum_j coeffs[j] T_j(x).
template <typename Derived>
typename Derived::Scalar chebyshev_series(const Eigen::DenseBase<Derived>& coeffs,
                                          typename Derived::Scalar x) {
  using Scalar = typename Derived::Scalar;
  x = clamp_to_unit(x);
  Scalar b1(0), b2(0);
  for (Eigen::Index j = coeffs.size() - 1; j >= 1; --j) {
    const Scalar b0 = coeffs(j) + Scalar(2) * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs.size() == 0 ? Scalar(0) : coeffs(0) + x * b1 - b2;
}

// ceil(x), except that x within 1e-9 (relative) above an integer rounds down
// to it.  Grid sizes like ceil(eps n) or ceil(2 x^{1/3}) go through here so a
// last-bit error in x cannot add a grid cell.
inline int ceil_robust(double x) {
  return static_cast<int>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

// The g roots of T_g, x_i = cos((2i - 1) pi / (2g)), i = 1..g, descending.
Eigen::VectorXd chebyshev_nodes(int g);

// Fourier coefficients bhat(0..2m-2) of the Jackson kernel
// (sin(m x / 2) / sin(x / 2))^4, as exact integers.
std::vector<std::int64_t> jackson_kernel_coeffs(int m);

struct JacksonDamping {
  int degree = 0;                     // k
  int kernel_half_degree = 0;         // m, smallest with 2m - 2 >= k
  std::vector<std::int64_t> kernel;   // bhat(0..2m-2)
  Eigen::VectorXd factors;            // b^0..b^k = bhat(j) / bhat(0)

  // Exact check on the integer kernel: bhat(0) >= bhat(1) >= ... >= 0.
  bool monotone() const;
};

JacksonDamping jackson_damping(int k);

struct ChebCoefficients {
  Eigen::VectorXd values;
  ChebBasis basis = ChebBasis::kPlain;

  int degree() const { return static_cast<int>(values.size()) - 1; }
  ChebCoefficients in_basis(ChebBasis target) const;
  // Evaluates sum_j c_j T_j(x) (or Tbar_j, per basis).
  double operator()(double x) const;
};

// Coefficients of the degree-`degree` interpolant through the degree+1
// Chebyshev nodes, by the discrete cosine sum.  Plain basis.
ChebCoefficients cheb_interpolation_coeffs(const std::function<double(double)>& f,
                                           int degree);

// sum_{j >= 1} (j c_j)^2 for coefficients in the normalized basis.
double decay_functional(const ChebCoefficients& c);

// Applies damping factors b^j to the first factors.size() coefficients and
// truncates the rest.
ChebCoefficients damped(const ChebCoefficients& c, const JacksonDamping& damping);

// A multi-index K in Z_{>=0}^d, d in {1, 2, 3}.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> k);
  MultiIndex(std::initializer_list<int> k) : MultiIndex(std::vector<int>(k)) {}

  int dim() const { return static_cast<int>(k_.size()); }
  int operator[](int i) const { return k_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& components() const { return k_; }

  std::int64_t norm2_squared() const { return norm2_sq_; }
  double norm2() const { return std::sqrt(static_cast<double>(norm2_sq_)); }
  int nonzeros() const;
  bool is_zero() const { return norm2_sq_ == 0; }

  bool operator==(const MultiIndex&) const = default;
  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> k_;
  std::int64_t norm2_sq_ = 0;
};

// All K in {0..m}^d \ {0}, in lexicographic order (last coordinate fastest).
std::vector<MultiIndex> multi_indices(int m, int d);

// T_K(x) = prod_i T_{k_i}(x_i).
double chebyshev_t_multi(const MultiIndex& k, std::span<const double> x);

// Tbar_K = T_K * sqrt(2^{nnz(K)} / pi^d).
double normalized_scale_multi(const MultiIndex& k);

}  // namespace momentforge

#endif  // MOMENTFORGE_CHEBYSHEV_HPP_
