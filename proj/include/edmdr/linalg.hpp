#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "edmdr/error.hpp"
#include "edmdr/matrix.hpp"

namespace edmdr {

inline double frobenius_norm(const Matrix& x) noexcept {
  double sum = 0.0;
  for (double v : x.values()) sum += v * v;
  return std::sqrt(sum);
}

/// Frobenius inner product <X, Y> = tr(X^T Y).
inline double frobenius_inner(const Matrix& x, const Matrix& y) {
  if (!x.same_shape(y)) throw InvalidInput("inner product shape mismatch");
  double sum = 0.0;
  const auto a = x.values();
  const auto b = y.values();
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

inline double frobenius_distance(const Matrix& x, const Matrix& y) {
  if (!x.same_shape(y)) throw InvalidInput("distance shape mismatch");
  double sum = 0.0;
  const auto a = x.values();
  const auto b = y.values();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// S = U diag(eigenvalues) U^T with eigenvalues sorted non-increasing and
/// column k of `eigenvectors` paired with eigenvalues[k].
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  std::size_t order() const noexcept { return eigenvalues.size(); }

  /// U diag(values) U^T for an arbitrary replacement spectrum.
  Matrix reconstruct(const std::vector<double>& values) const {
    const std::size_t n = order();
    Matrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double lam = values[k];
      if (lam == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const double ui = lam * eigenvectors(i, k);
        if (ui == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) out(i, j) += ui * eigenvectors(j, k);
      }
    }
    return out;
  }

  Matrix reconstruct() const { return reconstruct(eigenvalues); }
};

struct JacobiOptions {
  double relative_tolerance = 1e-12;
  int max_sweeps = 64;
  /// Eigenvalues closer than this (relative to max(1, |lambda_1|)) are
  /// treated as one cluster for ordering purposes.
  double cluster_tolerance = 1e-10;
};

namespace detail {

inline double offdiagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.order(); ++i)
    for (std::size_t j = i + 1; j < a.order(); ++j) sum += a(i, j) * a(i, j);
  return std::sqrt(2.0 * sum);
}

// Flips a column so its first entry of largest magnitude is nonnegative.
inline void canonicalize_sign(std::vector<double>& column) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < column.size(); ++i)
    if (std::abs(column[i]) > std::abs(column[best])) best = i;
  if (column.empty() || column[best] >= 0.0) return;
  for (double& v : column) v = -v;
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// The input is symmetrized first. Sweeps continue until the off-diagonal
/// Frobenius norm drops to `relative_tolerance * ||S||_F`. Output ordering is
/// fully deterministic: eigenvalues descend, each eigenvector has its first
/// largest-magnitude component nonnegative, and columns inside a cluster of
/// (numerically) repeated eigenvalues are ordered lexicographically,
/// largest first.
inline EigenDecomposition symmetric_eig(const Matrix& s,
                                        const JacobiOptions& opts = {}) {
  if (!s.is_square()) throw InvalidInput("symmetric_eig requires a square matrix");
  if (!s.all_finite()) throw InvalidInput("symmetric_eig: non-finite entries");

  const std::size_t n = s.order();
  Matrix a = symmetrize(s);
  Matrix v = Matrix::identity(n);
  const double threshold = opts.relative_tolerance * frobenius_norm(a);

  bool converged = detail::offdiagonal_norm(a) <= threshold;
  for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        const double tau = sn / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          const double new_rp = arp - sn * (arq + tau * arp);
          const double new_rq = arq + sn * (arp - tau * arq);
          a(r, p) = new_rp;
          a(p, r) = new_rp;
          a(r, q) = new_rq;
          a(q, r) = new_rq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - sn * (vrq + tau * vrp);
          v(r, q) = vrq + sn * (vrp - tau * vrq);
        }
      }
    }
    converged = detail::offdiagonal_norm(a) <= threshold;
    if (!a.all_finite())
      throw NumericalFailure("symmetric_eig: non-finite value during sweep");
  }
  if (!converged)
    throw NumericalFailure("symmetric_eig: no convergence within sweep budget");

  struct Pair {
    double value;
    std::vector<double> vec;
  };
  std::vector<Pair> pairs(n);
  for (std::size_t k = 0; k < n; ++k) {
    pairs[k].value = a(k, k);
    pairs[k].vec.resize(n);
    for (std::size_t i = 0; i < n; ++i) pairs[k].vec[i] = v(i, k);
    detail::canonicalize_sign(pairs[k].vec);
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& x, const Pair& y) { return x.value > y.value; });

  if (n > 0) {
    const double tol =
        opts.cluster_tolerance * std::max(1.0, std::abs(pairs.front().value));
    std::size_t start = 0;
    while (start < n) {
      std::size_t end = start + 1;
      while (end < n && pairs[start].value - pairs[end].value <= tol) ++end;
      std::sort(pairs.begin() + static_cast<std::ptrdiff_t>(start),
                pairs.begin() + static_cast<std::ptrdiff_t>(end),
                [](const Pair& x, const Pair& y) {
                  return std::lexicographical_compare(y.vec.begin(), y.vec.end(),
                                                      x.vec.begin(), x.vec.end());
                });
      start = end;
    }
  }

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = pairs[k].value;
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = pairs[k].vec[i];
  }
  return out;
}

}  // namespace edmdr
