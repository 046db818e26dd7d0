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

#include "momentforge/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace momentforge {

namespace {

// Distances closer than this count as ties and go to the lower index.
constexpr double kTieTolerance = 1e-14;

}  // namespace

DiscreteDistribution::DiscreteDistribution(Eigen::MatrixXd support, Eigen::VectorXd weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.rows() != weights_.size()) {
    throw std::invalid_argument("DiscreteDistribution: support/weights size mismatch");
  }
  if (weights_.size() == 0) throw std::invalid_argument("DiscreteDistribution: empty");
  if (support_.cols() < 1 || support_.cols() > 3) {
    throw std::invalid_argument("DiscreteDistribution: dimension must be 1, 2 or 3");
  }
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw std::invalid_argument("DiscreteDistribution: weights must be finite and >= 0");
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument("DiscreteDistribution: weights sum to " +
                                std::to_string(total));
  }
  for (Eigen::Index i = 0; i < support_.size(); ++i) {
    support_.data()[i] = clamp_to_unit(support_.data()[i]);
  }
}

DiscreteDistribution DiscreteDistribution::on_line(const Eigen::VectorXd& points,
                                                   const Eigen::VectorXd& weights) {
  return DiscreteDistribution(Eigen::MatrixXd(points), weights);
}

DiscreteDistribution DiscreteDistribution::normalized(Eigen::MatrixXd support,
                                                      Eigen::VectorXd weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) throw std::invalid_argument("normalized: total weight must be > 0");
  weights /= total;
  return DiscreteDistribution(std::move(support), std::move(weights));
}

DiscreteDistribution DiscreteDistribution::uniform(Eigen::MatrixXd points) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw std::invalid_argument("uniform: no points");
  return DiscreteDistribution(std::move(points),
                              Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

DiscreteDistribution DiscreteDistribution::point_mass(double x) {
  return DiscreteDistribution(Eigen::MatrixXd::Constant(1, 1, x), Eigen::VectorXd::Ones(1));
}

DiscreteDistribution DiscreteDistribution::pruned(double threshold) const {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (weights_(i) >= threshold) keep.push_back(i);
  }
  if (keep.empty()) throw std::runtime_error("pruned: all weights below threshold");
  Eigen::MatrixXd s(static_cast<Eigen::Index>(keep.size()), support_.cols());
  Eigen::VectorXd w(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    s.row(static_cast<Eigen::Index>(r)) = support_.row(keep[r]);
    w(static_cast<Eigen::Index>(r)) = weights_(keep[r]);
  }
  w /= w.sum();
  return DiscreteDistribution(std::move(s), std::move(w), Unchecked{});
}

DiscreteDistribution DiscreteDistribution::consolidated() const {
  if (dim() != 1) throw std::invalid_argument("consolidated: 1-D only");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return support_(a, 0) < support_(b, 0); });
  std::vector<double> xs, ws;
  for (Eigen::Index i : order) {
    if (!xs.empty() && xs.back() == support_(i, 0)) {
      ws.back() += weights_(i);
    } else {
      xs.push_back(support_(i, 0));
      ws.push_back(weights_(i));
    }
  }
  const auto n = static_cast<Eigen::Index>(xs.size());
  return DiscreteDistribution(Eigen::Map<Eigen::MatrixXd>(xs.data(), n, 1),
                              Eigen::Map<Eigen::VectorXd>(ws.data(), n), Unchecked{});
}

DiscreteDistribution DiscreteDistribution::affine(double scale, double shift) const {
  Eigen::MatrixXd s = (support_.array() * scale + shift).matrix();
  return DiscreteDistribution(std::move(s), weights_, Unchecked{});
}

MomentVector MomentVector::in_basis(ChebBasis target) const {
  if (target == basis) return *this;
  const double s = normalized_scale<double>(1);
  return MomentVector{target == ChebBasis::kNormalized ? Eigen::VectorXd(values * s)
                                                       : Eigen::VectorXd(values / s),
                      target};
}

Grid Grid::uniform(int cells_per_unit) {
  if (cells_per_unit < 1) throw std::invalid_argument("Grid::uniform: resolution must be >= 1");
  Grid grid;
  grid.kind = GridKind::kUniform;
  grid.resolution = cells_per_unit;
  grid.spacing = 1.0 / cells_per_unit;
  const int r = 2 * cells_per_unit + 1;
  grid.points.resize(r);
  for (int i = 0; i < r; ++i) {
    grid.points(i) = -1.0 + static_cast<double>(i) / cells_per_unit;
  }
  grid.points(r - 1) = 1.0;
  return grid;
}

Grid Grid::chebyshev(int g) {
  Grid grid;
  grid.kind = GridKind::kChebyshevNodes;
  grid.resolution = g;
  grid.points = chebyshev_nodes(g);
  return grid;
}

Grid Grid::tensor_uniform(int cells_per_unit, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("Grid::tensor_uniform: d must be 1..3");
  Grid grid = uniform(cells_per_unit);
  grid.kind = d == 1 ? GridKind::kUniform : GridKind::kTensorUniform;
  grid.dim = d;
  return grid;
}

Eigen::Index Grid::size() const {
  Eigen::Index total = 1;
  for (int i = 0; i < dim; ++i) total *= axis_size();
  return total;
}

Eigen::MatrixXd Grid::materialize() const {
  const Eigen::Index r = axis_size();
  const Eigen::Index total = size();
  Eigen::MatrixXd out(total, dim);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    for (int axis = dim - 1; axis >= 0; --axis) {
      out(flat, axis) = points(rem % r);
      rem /= r;
    }
  }
  return out;
}

MomentVector cheb_moments(const DiscreteDistribution& p, int k, ChebBasis basis) {
  if (p.dim() != 1) throw std::invalid_argument("cheb_moments: 1-D distributions only");
  if (k < 1) throw std::invalid_argument("cheb_moments: k must be >= 1");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(k);
  std::vector<double> t(static_cast<std::size_t>(k) + 1);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    chebyshev_t_all(p.support()(i, 0), std::span<double>(t));
    const double w = p.weights()(i);
    for (int j = 1; j <= k; ++j) m(j - 1) += w * t[static_cast<std::size_t>(j)];
  }
  MomentVector out{std::move(m), ChebBasis::kPlain};
  return out.in_basis(basis);
}

MultiMoments cheb_moments_multi(const DiscreteDistribution& p, int m, ChebBasis basis) {
  const int d = p.dim();
  if (d < 2 || d > 3) throw std::invalid_argument("cheb_moments_multi: d must be 2 or 3");
  if (m < 1) throw std::invalid_argument("cheb_moments_multi: m must be >= 1");
  MultiMoments out;
  out.m = m;
  out.dim = d;
  out.basis = basis;
  out.indices = multi_indices(m, d);
  out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.indices.size()));

  // Per-point, per-axis tables T_0..T_m, then products.
  std::vector<double> table(static_cast<std::size_t>(d) * (m + 1));
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (int a = 0; a < d; ++a) {
      chebyshev_t_all(p.support()(i, a),
                      std::span<double>(table.data() + static_cast<std::size_t>(a) * (m + 1),
                                        static_cast<std::size_t>(m) + 1));
    }
    const double w = p.weights()(i);
    for (std::size_t r = 0; r < out.indices.size(); ++r) {
      const MultiIndex& K = out.indices[r];
      double prod = w;
      for (int a = 0; a < d; ++a) prod *= table[static_cast<std::size_t>(a * (m + 1) + K[a])];
      out.values(static_cast<Eigen::Index>(r)) += prod;
    }
  }
  if (basis == ChebBasis::kNormalized) {
    for (std::size_t r = 0; r < out.indices.size(); ++r) {
      out.values(static_cast<Eigen::Index>(r)) *= normalized_scale_multi(out.indices[r]);
    }
  }
  return out;
}

double w1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.dim() != 1 || q.dim() != 1) {
    throw std::invalid_argument("w1_distance: exact W1 is implemented for d = 1 only");
  }
  struct Atom {
    double x;
    double signed_mass;
  };
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(p.size() + q.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) atoms.push_back({p.support()(i, 0), p.weights()(i)});
  for (Eigen::Index i = 0; i < q.size(); ++i) atoms.push_back({q.support()(i, 0), -q.weights()(i)});
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  double cdf_gap = 0.0, total = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
    cdf_gap += atoms[i].signed_mass;
    total += std::abs(cdf_gap) * (atoms[i + 1].x - atoms[i].x);
  }
  return total;
}

MomentErrorReport moment_error_gamma(const MomentVector& mp, const MomentVector& mq) {
  if (mp.basis != ChebBasis::kPlain || mq.basis != ChebBasis::kPlain) {
    throw std::invalid_argument("moment_error_gamma: plain-basis moments required");
  }
  if (mp.degree() != mq.degree() || mp.degree() < 1) {
    throw std::invalid_argument("moment_error_gamma: degree mismatch");
  }
  const int k = mp.degree();
  double sum = 0.0;
  for (int j = 1; j <= k; ++j) {
    const double diff = (mp[j] - mq[j]) / j;
    sum += diff * diff;
  }
  MomentErrorReport report;
  report.k = k;
  report.gamma = std::sqrt(sum);
  report.w1_bound = 36.0 / k + report.gamma;
  report.w1_bound_conjectured = 2.0 * std::numbers::pi / k + report.gamma;
  return report;
}

std::vector<Eigen::Index> round_to_grid_index(const Eigen::VectorXd& points, const Grid& grid) {
  if (grid.points.size() == 0) throw std::invalid_argument("round_to_grid: empty grid");
  if (grid.kind == GridKind::kChebyshevNodes) {
    throw std::invalid_argument("round_to_grid: uniform grids only (use arccos_round)");
  }
  const Eigen::Index last = grid.points.size() - 1;
  std::vector<Eigen::Index> out(static_cast<std::size_t>(points.size()));
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const double x = points(i);
    const double pos = (x - grid.points(0)) / grid.spacing;
    auto lo = static_cast<Eigen::Index>(std::floor(pos));
    lo = std::clamp<Eigen::Index>(lo, 0, last);
    Eigen::Index hi = std::min(lo + 1, last);
    // Floor may land one cell off near representable boundaries; fix up.
    while (lo > 0 && grid.points(lo) > x) hi = lo--;
    while (hi < last && grid.points(hi) < x) lo = hi++;
    const double dlo = std::abs(x - grid.points(lo));
    const double dhi = std::abs(grid.points(hi) - x);
    out[static_cast<std::size_t>(i)] = dhi < dlo - kTieTolerance ? hi : lo;
  }
  return out;
}

Eigen::VectorXd round_to_grid(const Eigen::VectorXd& points, const Grid& grid) {
  const auto idx = round_to_grid_index(points, grid);
  Eigen::VectorXd out(points.size());
  for (Eigen::Index i = 0; i < points.size(); ++i) out(i) = grid.points(idx[static_cast<std::size_t>(i)]);
  return out;
}

Eigen::Index arccos_round_index(double x, const Grid& nodes) {
  if (nodes.kind != GridKind::kChebyshevNodes) {
    throw std::invalid_argument("arccos_round: Chebyshev-node grid required");
  }
  const int g = nodes.resolution;
  const double pi = std::numbers::pi;
  const double theta = std::acos(clamp_to_unit(x));
  // Node i (1-based) sits at theta_i = (2i - 1) pi / (2g).
  const double pos = (theta * 2.0 * g / pi + 1.0) / 2.0;
  auto lo = static_cast<int>(std::floor(pos));
  lo = std::clamp(lo, 1, g);
  const int hi = std::min(lo + 1, g);
  const double tlo = (2.0 * lo - 1.0) * pi / (2.0 * g);
  const double thi = (2.0 * hi - 1.0) * pi / (2.0 * g);
  const int best = std::abs(thi - theta) < std::abs(theta - tlo) - kTieTolerance ? hi : lo;
  return best - 1;
}

double arccos_round(double x, const Grid& nodes) {
  return nodes.points(arccos_round_index(x, nodes));
}

}  // namespace momentforge
