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

#include "momentforge/moment_map.hpp"

#include <cmath>
#include <stdexcept>

namespace momentforge {

ChebyshevMomentMap::ChebyshevMomentMap(Eigen::VectorXd grid, int k)
    : x_(std::move(grid).array()), k_(k) {
  if (k_ < 1) throw std::invalid_argument("ChebyshevMomentMap: k must be >= 1");
  if (x_.size() == 0) throw std::invalid_argument("ChebyshevMomentMap: empty grid");
  for (Eigen::Index i = 0; i < x_.size(); ++i) x_(i) = clamp_to_unit(x_(i));
}

void ChebyshevMomentMap::apply(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
  out.resize(k_);
  Eigen::ArrayXd prev = Eigen::ArrayXd::Ones(x_.size());
  Eigen::ArrayXd cur = x_;
  Eigen::ArrayXd next(x_.size());
  const Eigen::ArrayXd two_x = 2.0 * x_;
  out(0) = (cur * z.array()).sum();
  for (int j = 2; j <= k_; ++j) {
    next = two_x * cur - prev;
    out(j - 1) = (next * z.array()).sum();
    prev.swap(cur);
    cur.swap(next);
  }
}

void ChebyshevMomentMap::adjoint(const Eigen::VectorXd& y, Eigen::VectorXd& out) const {
  // Clenshaw over the columns: sum_j y_j T_j(x_i) with y_0 = 0.
  const Eigen::Index r = x_.size();
  Eigen::ArrayXd b1 = Eigen::ArrayXd::Zero(r);
  Eigen::ArrayXd b2 = Eigen::ArrayXd::Zero(r);
  Eigen::ArrayXd b0(r);
  const Eigen::ArrayXd two_x = 2.0 * x_;
  for (int j = k_; j >= 1; --j) {
    b0 = two_x * b1 - b2 + y(j - 1);
    b2.swap(b1);
    b1.swap(b0);
  }
  // Now b1 = b_1, b2 = b_2; the series with zero constant term is x b_1 - b_2.
  out = (x_ * b1 - b2).matrix();
}

Eigen::VectorXd ChebyshevMomentMap::column(Eigen::Index i) const {
  std::vector<double> t(static_cast<std::size_t>(k_) + 1);
  chebyshev_t_all(x_(i), std::span<double>(t));
  return Eigen::Map<const Eigen::VectorXd>(t.data() + 1, k_);
}

TensorMomentMap::TensorMomentMap(const Eigen::VectorXd& axis_points, int m, int d)
    : m_(m), d_(d), indices_(multi_indices(m, d)) {
  if (d < 2 || d > 3) throw std::invalid_argument("TensorMomentMap: d must be 2 or 3");
  const Eigen::Index r = axis_points.size();
  basis_.resize(m + 1, r);
  std::vector<double> t(static_cast<std::size_t>(m) + 1);
  for (Eigen::Index i = 0; i < r; ++i) {
    chebyshev_t_all(axis_points(i), std::span<double>(t));
    for (int k = 0; k <= m; ++k) basis_(k, i) = normalized_scale<double>(k) * t[static_cast<std::size_t>(k)];
  }
}

Eigen::Index TensorMomentMap::rows() const { return static_cast<Eigen::Index>(indices_.size()); }

Eigen::Index TensorMomentMap::cols() const {
  Eigen::Index total = 1;
  for (int a = 0; a < d_; ++a) total *= basis_.cols();
  return total;
}

namespace {

// Contracts the leading axis of a row-major tensor with `mat` (p x q), i.e.
// maps shape (q, rest) to (rest, p): result is the transposed mode product, so
// d successive calls cycle every axis through once.
Eigen::VectorXd contract_leading(const Eigen::MatrixXd& mat, const Eigen::VectorXd& tensor,
                                 Eigen::Index rest) {
  const Eigen::Index q = mat.cols();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> t(
      tensor.data(), q, rest);
  // (rest x q) * (q x p) stored row-major gives shape (rest, p).
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out =
      t.transpose() * mat.transpose();
  return Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
}

}  // namespace

void TensorMomentMap::apply(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
  const Eigen::Index r = basis_.cols();
  const Eigen::Index mp1 = basis_.rows();
  Eigen::VectorXd t = z;
  Eigen::Index rest = cols() / r;
  for (int a = 0; a < d_; ++a) {
    t = contract_leading(basis_, t, rest);
    rest = rest / r * mp1;
  }
  // t is now the full (m+1)^d moment tensor including K = 0 at position 0.
  out = t.tail(t.size() - 1);
}

void TensorMomentMap::adjoint(const Eigen::VectorXd& y, Eigen::VectorXd& out) const {
  const Eigen::Index r = basis_.cols();
  const Eigen::Index mp1 = basis_.rows();
  Eigen::VectorXd t(y.size() + 1);
  t(0) = 0.0;
  t.tail(y.size()) = y;
  const Eigen::MatrixXd bt = basis_.transpose();
  Eigen::Index rest = t.size() / mp1;
  for (int a = 0; a < d_; ++a) {
    t = contract_leading(bt, t, rest);
    rest = rest / mp1 * r;
  }
  out = std::move(t);
}

Eigen::VectorXd TensorMomentMap::column(Eigen::Index i) const {
  const Eigen::Index r = basis_.cols();
  std::vector<Eigen::Index> axis(static_cast<std::size_t>(d_));
  Eigen::Index rem = i;
  for (int a = d_ - 1; a >= 0; --a) {
    axis[static_cast<std::size_t>(a)] = rem % r;
    rem /= r;
  }
  Eigen::VectorXd col(rows());
  for (std::size_t row = 0; row < indices_.size(); ++row) {
    double prod = 1.0;
    for (int a = 0; a < d_; ++a) prod *= basis_(indices_[row][a], axis[static_cast<std::size_t>(a)]);
    col(static_cast<Eigen::Index>(row)) = prod;
  }
  return col;
}

double gram_norm_estimate(const MomentMap& map, const Eigen::VectorXd& row_weights, int iters) {
  const Eigen::Index n = map.cols();
  // Deterministic, non-symmetric start so no eigendirection is missed by parity.
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + 3.7 * static_cast<double>(i));
  v.normalize();
  Eigen::VectorXd av, w;
  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    map.apply(v, av);
    av.array() *= row_weights.array();
    map.adjoint(av, w);
    estimate = std::max(estimate, v.dot(w));
    const double norm = w.norm();
    if (!(norm > 0.0)) return 0.0;
    v = w / norm;
  }
  return estimate;
}

}  // namespace momentforge
