#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edmdr/error.hpp"
#include "edmdr/linalg.hpp"
#include "edmdr/matrix.hpp"

namespace edmdr {

/// m labeled points in R^q. Coordinates are stored as an m x q matrix, one
/// point per row; lengths are in Angstrom throughout.
class PointCloud {
 public:
  PointCloud() = default;

  explicit PointCloud(Matrix coordinates)
      : PointCloud(std::move(coordinates), {}, {}) {}

  PointCloud(Matrix coordinates, std::vector<std::string> elements,
             std::vector<std::size_t> residues)
      : coords_(std::move(coordinates)),
        elements_(std::move(elements)),
        residues_(std::move(residues)) {
    if (coords_.rows() > 0 && coords_.cols() == 0)
      throw InvalidInput("point cloud dimension must be at least 1");
    if (!coords_.all_finite()) throw InvalidInput("point cloud has non-finite coordinates");
    if (elements_.empty()) elements_.assign(coords_.rows(), "X");
    if (residues_.empty()) residues_.assign(coords_.rows(), 0);
    if (elements_.size() != coords_.rows() || residues_.size() != coords_.rows())
      throw InvalidInput("point cloud label count does not match point count");
  }

  std::size_t size() const noexcept { return coords_.rows(); }
  std::size_t dim() const noexcept { return coords_.cols(); }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> point(std::size_t i) const { return coords_.row_view(i); }
  double coord(std::size_t i, std::size_t k) const { return coords_(i, k); }

  const Matrix& coordinates() const noexcept { return coords_; }
  const std::vector<std::string>& elements() const noexcept { return elements_; }
  const std::vector<std::size_t>& residues() const noexcept { return residues_; }

  /// Same coordinates, labels taken from `other` (which must have equal size).
  PointCloud with_labels_of(const PointCloud& other) const {
    return PointCloud(coords_, other.elements_, other.residues_);
  }

 private:
  Matrix coords_;
  std::vector<std::string> elements_;
  std::vector<std::size_t> residues_;
};

/// Squared distances known on a symmetric index set that always contains the
/// diagonal. Values are Angstrom^2. Hollowness, symmetry and non-negativity
/// hold by construction.
class PartialEDM {
 public:
  PartialEDM() = default;

  explicit PartialEDM(std::size_t order)
      : order_(order), mask_(order * order, 0), values_(order) {
    for (std::size_t i = 0; i < order; ++i) mask_[i * order + i] = 1;
  }

  /// Marks (i, j) and (j, i) known with the given squared distance.
  void set(std::size_t i, std::size_t j, double squared_distance) {
    if (i >= order_ || j >= order_) throw InvalidInput("partial EDM index out of range");
    if (!std::isfinite(squared_distance) || squared_distance < 0.0)
      throw InvalidInput("partial EDM values must be finite and nonnegative");
    if (i == j) {
      if (squared_distance != 0.0) throw InvalidInput("partial EDM diagonal must be zero");
      return;
    }
    mask_[i * order_ + j] = 1;
    mask_[j * order_ + i] = 1;
    values_(i, j) = squared_distance;
    values_(j, i) = squared_distance;
  }

  std::size_t order() const noexcept { return order_; }
  bool known(std::size_t i, std::size_t j) const { return mask_[i * order_ + j] != 0; }
  double value(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& values() const noexcept { return values_; }

  /// Number of known unordered off-diagonal pairs.
  std::size_t known_pairs() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < order_; ++i)
      for (std::size_t j = i + 1; j < order_; ++j) n += known(i, j) ? 1 : 0;
    return n;
  }

  double max_value() const {
    double best = 0.0;
    for (double v : values_.values()) best = std::max(best, v);
    return best;
  }

 private:
  std::size_t order_ = 0;
  std::vector<std::uint8_t> mask_;
  Matrix values_;
};

/// Blocks of Q(-X)Q = [[xhat, d], [d^T, delta]].
struct HouseholderBlocks {
  Matrix xhat;
  std::vector<double> d;
  double delta = 0.0;
};

/// Q = I - 2 v v^T / (v^T v) with v = (1, ..., 1, 1 + sqrt(m)).
inline Matrix householder_q(std::size_t m) {
  if (m < 2) throw InvalidInput("householder_q requires m >= 2");
  std::vector<double> v(m, 1.0);
  v.back() = 1.0 + std::sqrt(static_cast<double>(m));
  double vtv = 0.0;
  for (double x : v) vtv += x * x;
  Matrix q = Matrix::identity(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) q(i, j) -= 2.0 * v[i] * v[j] / vtv;
  return q;
}

namespace detail {

// Q X Q in O(m^2) using Q = I - beta v v^T; the result is symmetrized.
inline Matrix householder_conjugate(const Matrix& x) {
  const std::size_t m = x.order();
  std::vector<double> v(m, 1.0);
  v.back() = 1.0 + std::sqrt(static_cast<double>(m));
  double vtv = 0.0;
  for (double e : v) vtv += e * e;
  const double beta = 2.0 / vtv;

  // Y = X - beta v (v^T X)
  std::vector<double> w(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) w[j] += v[i] * x(i, j);
  Matrix y = x;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) y(i, j) -= beta * v[i] * w[j];

  // Z = Y - beta (Y v) v^T
  std::vector<double> yv(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) yv[i] += y(i, j) * v[j];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) y(i, j) -= beta * yv[i] * v[j];
  return symmetrize(y);
}

inline double symmetry_tolerance(const Matrix& x) {
  return 1e-10 * std::max(1.0, frobenius_norm(x));
}

}  // namespace detail

/// Splits Q(-X)Q into its leading (m-1) x (m-1) block, last column and
/// corner entry.
inline HouseholderBlocks split_blocks(const Matrix& x) {
  if (!x.is_square() || x.order() < 2)
    throw InvalidInput("split_blocks requires a square matrix of order >= 2");
  if (asymmetry(x) > detail::symmetry_tolerance(x))
    throw InvalidInput("split_blocks requires a symmetric matrix");
  const std::size_t m = x.order();
  const Matrix c = detail::householder_conjugate(-symmetrize(x));

  HouseholderBlocks b;
  b.xhat = Matrix(m - 1);
  b.d.resize(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (std::size_t j = 0; j + 1 < m; ++j) b.xhat(i, j) = c(i, j);
    b.d[i] = c(i, m - 1);
  }
  b.delta = c(m - 1, m - 1);
  return b;
}

/// Inverse of split_blocks: -Q [[xhat, d], [d^T, delta]] Q.
inline Matrix assemble_blocks(const HouseholderBlocks& b) {
  const std::size_t n = b.xhat.order();
  if (!b.xhat.is_square() || b.d.size() != n)
    throw InvalidInput("inconsistent Householder blocks");
  Matrix c(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c(i, j) = b.xhat(i, j);
    c(i, n) = b.d[i];
    c(n, i) = b.d[i];
  }
  c(n, n) = b.delta;
  return -detail::householder_conjugate(c);
}

struct EdmCheck {
  bool is_edm = false;
  std::size_t embedding_dim = 0;
};

/// Hayden-Wells test: X is an EDM iff it is nonnegative, hollow, symmetric
/// and the leading block of Q(-X)Q is positive semidefinite. The rank of that
/// block is the irreducible embedding dimension.
inline EdmCheck is_edm(const Matrix& x, double tol = 1e-8) {
  if (!x.is_square() || !x.all_finite()) return {};
  const std::size_t m = x.order();
  double scale = 1.0;
  for (double v : x.values()) {
    if (v < 0.0) return {};
    scale = std::max(scale, v);
  }
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(x(i, i)) > tol * scale) return {};
  if (asymmetry(x) > tol * scale) return {};
  if (m < 2) return {true, 0};

  const auto eig = symmetric_eig(split_blocks(symmetrize(x)).xhat);
  const double cut = tol * std::max(1.0, eig.eigenvalues.front());
  if (eig.eigenvalues.back() < -cut) return {false, 0};
  const auto dim = static_cast<std::size_t>(
      std::count_if(eig.eigenvalues.begin(), eig.eigenvalues.end(),
                    [cut](double l) { return l > cut; }));
  return {true, dim};
}

/// D_ij = ||z_i - z_j||^2.
inline Matrix edm_from_points(const PointCloud& pc) {
  const std::size_t m = pc.size();
  Matrix d(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < pc.dim(); ++k) {
        const double diff = pc.coord(i, k) - pc.coord(j, k);
        s += diff * diff;
      }
      d(i, j) = s;
      d(j, i) = s;
    }
  return d;
}

/// Classical scaling: double-center X into tau = -L X L / 2 with
/// L = I - e e^T / m, factor tau, and take the first q columns of
/// U sqrt(Lambda+). Negative spectrum (from inexact EDMs) is clamped to zero
/// and the returned points are centered at the origin.
inline PointCloud points_from_edm(const Matrix& x, std::size_t q) {
  if (!x.is_square()) throw InvalidInput("points_from_edm requires a square matrix");
  const std::size_t m = x.order();
  if (q < 1 || q + 1 > m)
    throw InvalidInput("points_from_edm: dimension must satisfy 1 <= q <= m-1");

  const Matrix s = symmetrize(x);
  std::vector<double> row_mean(m, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) row_mean[i] += s(i, j);
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(m);
  }
  grand /= static_cast<double>(m * m);

  Matrix tau(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      tau(i, j) = -0.5 * (s(i, j) - row_mean[i] - row_mean[j] + grand);

  const auto eig = symmetric_eig(tau);
  Matrix z(m, q);
  for (std::size_t k = 0; k < q; ++k) {
    const double scale = std::sqrt(std::max(0.0, eig.eigenvalues[k]));
    for (std::size_t i = 0; i < m; ++i) z(i, k) = eig.eigenvectors(i, k) * scale;
  }
  for (std::size_t k = 0; k < q; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += z(i, k);
    mean /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) z(i, k) -= mean;
  }
  return PointCloud(std::move(z));
}

}  // namespace edmdr
