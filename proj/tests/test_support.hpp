#pragma once

// Generators and brute-force oracles shared by the test binaries. Nothing in
// here calls the routines under test except where noted.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "edmdr/edm.hpp"
#include "edmdr/matrix.hpp"
#include "edmdr/pipeline.hpp"
#include "edmdr/random.hpp"

namespace edmdr::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Matrix x(rows, cols);
  for (double& v : x.values()) v = rng.uniform(lo, hi);
  return x;
}

inline Matrix random_symmetric(std::size_t m, Rng& rng, double scale = 1.0) {
  Matrix x(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const double v = rng.uniform(-scale, scale);
      x(i, j) = v;
      x(j, i) = v;
    }
  return x;
}

inline PointCloud random_cloud(std::size_t m, std::size_t q, Rng& rng, double box = 1.0) {
  return PointCloud(random_matrix(m, q, rng, 0.0, box));
}

/// Random orthogonal q x q matrix (Gram-Schmidt on Gaussian columns); with
/// `reflect` the first column is negated so det = -1 is reachable.
inline Matrix random_orthogonal(std::size_t q, Rng& rng, bool reflect = false) {
  Matrix g(q);
  for (double& v : g.values()) v = rng.normal();
  for (std::size_t k = 0; k < q; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      double dot = 0.0;
      for (std::size_t i = 0; i < q; ++i) dot += g(i, k) * g(i, j);
      for (std::size_t i = 0; i < q; ++i) g(i, k) -= dot * g(i, j);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < q; ++i) norm += g(i, k) * g(i, k);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < q; ++i) g(i, k) /= norm;
  }
  if (reflect)
    for (std::size_t i = 0; i < q; ++i) g(i, 0) = -g(i, 0);
  return g;
}

/// Applies z -> R z + t to every point.
inline PointCloud rigid_motion(const PointCloud& pc, const Matrix& rot,
                               const std::vector<double>& shift) {
  Matrix out(pc.size(), pc.dim());
  for (std::size_t i = 0; i < pc.size(); ++i)
    for (std::size_t r = 0; r < pc.dim(); ++r) {
      double s = shift[r];
      for (std::size_t c = 0; c < pc.dim(); ++c) s += rot(r, c) * pc.coord(i, c);
      out(i, r) = s;
    }
  return PointCloud(std::move(out), pc.elements(), pc.residues());
}

/// Direct double-loop sum of squared differences.
inline double sum_sq_diff(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - b(i, j);
      s += d * d;
    }
  return s;
}

/// Naive triple-loop squared-distance matrix.
inline Matrix naive_edm(const PointCloud& pc) {
  Matrix d(pc.size());
  for (std::size_t i = 0; i < pc.size(); ++i)
    for (std::size_t j = 0; j < pc.size(); ++j)
      for (std::size_t k = 0; k < pc.dim(); ++k) {
        const double diff = pc.coord(i, k) - pc.coord(j, k);
        d(i, j) += diff * diff;
      }
  return d;
}

/// Random PSD matrix of rank at most q: G G^T with G m x q.
inline Matrix random_low_rank_psd(std::size_t m, std::size_t q, Rng& rng, double scale = 1.0) {
  const Matrix g = random_matrix(m, q, rng, -scale, scale);
  return g * g.transpose();
}

/// Random member of C2: -Q [[Y, c], [c^T, beta]] Q with Y PSD of rank <= q.
/// Uses assemble_blocks, whose round trip is tested separately.
inline Matrix random_c2_member(std::size_t m, std::size_t q, Rng& rng, double scale = 1.0) {
  HouseholderBlocks b;
  b.xhat = random_low_rank_psd(m - 1, q, rng, scale);
  b.d.resize(m - 1);
  for (double& v : b.d) v = rng.uniform(-scale, scale);
  b.delta = rng.uniform(-scale, scale);
  return assemble_blocks(b);
}

/// The desk-scale reconstruction instance used by the acceptance suite:
/// first cloud of 20 uniform points in the unit cube (cloud seeds 1, 2, ...)
/// whose top-percent observation graph gives every atom at least q + 1
/// observed neighbours.
struct DeskInstance {
  std::uint64_t cloud_seed = 0;
  PointCloud cloud;
  PartialEDM partial;
};

inline std::size_t min_observed_degree(const PartialEDM& partial) {
  std::size_t best = partial.order();
  for (std::size_t i = 0; i < partial.order(); ++i) {
    std::size_t d = 0;
    for (std::size_t j = 0; j < partial.order(); ++j) d += (i != j && partial.known(i, j));
    best = std::min(best, d);
  }
  return best;
}

inline DeskInstance desk_instance(std::size_t m = 20, double percent = 40.0, std::size_t q = 3) {
  for (std::uint64_t seed = 1;; ++seed) {
    Rng rng(seed);
    PointCloud pc = random_cloud(m, q, rng);
    PartialEDM partial = build_partial_edm(pc, ObservationModel::top_percent(percent));
    if (min_observed_degree(partial) >= q + 1) return {seed, std::move(pc), std::move(partial)};
  }
}

}  // namespace edmdr::testing
