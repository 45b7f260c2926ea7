#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "edmdr/edm.hpp"
#include "edmdr/error.hpp"
#include "edmdr/linalg.hpp"
#include "edmdr/matrix.hpp"

namespace edmdr {

/// aligned_k = rotation * (reconstructed_k - centroid_r) + centroid_a.
/// `rotation` is orthogonal and may be a reflection.
struct AlignmentResult {
  PointCloud aligned;
  Matrix rotation;
  std::vector<double> translation;
};

namespace detail {

inline std::vector<double> centroid(const PointCloud& pc) {
  std::vector<double> c(pc.dim(), 0.0);
  for (std::size_t i = 0; i < pc.size(); ++i)
    for (std::size_t k = 0; k < pc.dim(); ++k) c[k] += pc.coord(i, k);
  for (double& v : c) v /= static_cast<double>(pc.size());
  return c;
}

// Completes the columns of `u` flagged in `missing` to an orthonormal basis
// by Gram-Schmidt against the standard basis vectors.
inline void complete_orthonormal(Matrix& u, const std::vector<bool>& missing) {
  const std::size_t q = u.rows();
  std::size_t next_basis = 0;
  for (std::size_t k = 0; k < q; ++k) {
    if (!missing[k]) continue;
    while (next_basis < q) {
      std::vector<double> cand(q, 0.0);
      cand[next_basis++] = 1.0;
      for (std::size_t j = 0; j < q; ++j) {
        if (missing[j] && j >= k) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < q; ++i) dot += cand[i] * u(i, j);
        for (std::size_t i = 0; i < q; ++i) cand[i] -= dot * u(i, j);
      }
      double norm = 0.0;
      for (double v : cand) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 1e-6) {
        for (std::size_t i = 0; i < q; ++i) u(i, k) = cand[i] / norm;
        break;
      }
    }
  }
}

}  // namespace detail

/// Least-squares rigid fit of `reconstructed` onto `actual` over rotations,
/// reflections and translations (no scaling).
///
/// With both clouds centered, M = B^T A (B reconstructed, A actual) has
/// SVD U S V^T and the optimal map is R = V U^T. The SVD is obtained from
/// the eigendecomposition of M^T M; left singular vectors belonging to zero
/// singular values (degenerate clouds) are completed arbitrarily, which does
/// not change the residual.
inline AlignmentResult procrustes_align(const PointCloud& actual,
                                        const PointCloud& reconstructed) {
  if (actual.size() != reconstructed.size() || actual.dim() != reconstructed.dim())
    throw InvalidInput("procrustes_align: point clouds differ in size or dimension");
  if (actual.empty()) throw InvalidInput("procrustes_align: empty point cloud");

  const std::size_t m = actual.size();
  const std::size_t q = actual.dim();
  const auto ca = detail::centroid(actual);
  const auto cr = detail::centroid(reconstructed);

  Matrix cross(q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t r = 0; r < q; ++r) {
      const double b = reconstructed.coord(i, r) - cr[r];
      for (std::size_t c = 0; c < q; ++c) cross(r, c) += b * (actual.coord(i, c) - ca[c]);
    }

  const auto eig = symmetric_eig(cross.transpose() * cross);
  const Matrix& v = eig.eigenvectors;
  const Matrix mv = cross * v;
  const double sigma_max = std::sqrt(std::max(0.0, eig.eigenvalues.front()));
  Matrix u(q);
  std::vector<bool> missing(q, false);
  for (std::size_t k = 0; k < q; ++k) {
    const double sigma = std::sqrt(std::max(0.0, eig.eigenvalues[k]));
    if (sigma <= 1e-12 * std::max(1.0, sigma_max)) {
      missing[k] = true;
      continue;
    }
    for (std::size_t i = 0; i < q; ++i) u(i, k) = mv(i, k) / sigma;
  }
  detail::complete_orthonormal(u, missing);

  AlignmentResult out;
  out.rotation = v * u.transpose();
  out.translation = ca;
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t c = 0; c < q; ++c) out.translation[r] -= out.rotation(r, c) * cr[c];

  Matrix aligned(m, q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t r = 0; r < q; ++r) {
      double s = ca[r];
      for (std::size_t c = 0; c < q; ++c)
        s += out.rotation(r, c) * (reconstructed.coord(i, c) - cr[c]);
      aligned(i, r) = s;
    }
  out.aligned = PointCloud(std::move(aligned), reconstructed.elements(),
                           reconstructed.residues());
  return out;
}

/// ||X_actual - X||_F.
inline double edm_error(const Matrix& actual, const Matrix& reconstructed) {
  if (!actual.same_shape(reconstructed)) throw InvalidInput("edm_error: order mismatch");
  return frobenius_distance(actual, reconstructed);
}

/// sqrt(sum_k ||z_actual_k - z_aligned_k||^2).
inline double position_error(const PointCloud& actual, const PointCloud& aligned) {
  if (actual.size() != aligned.size() || actual.dim() != aligned.dim())
    throw InvalidInput("position_error: point clouds differ in size or dimension");
  return frobenius_distance(actual.coordinates(), aligned.coordinates());
}

}  // namespace edmdr
