#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "edmdr/edm.hpp"
#include "edmdr/error.hpp"
#include "edmdr/linalg.hpp"
#include "edmdr/matrix.hpp"

namespace edmdr {

/// C1: symmetric nonnegative matrices agreeing with the known entries.
struct DataConstraint {
  PartialEDM partial;

  std::size_t order() const noexcept { return partial.order(); }
};

/// C2: symmetric X whose Householder block xhat is PSD with rank <= q.
class RankEdmConstraint {
 public:
  RankEdmConstraint(std::size_t order, std::size_t rank_bound)
      : order_(order), rank_bound_(rank_bound) {
    if (rank_bound < 1 || rank_bound + 1 > order)
      throw InvalidInput("rank bound must satisfy 1 <= q <= m-1");
  }

  std::size_t order() const noexcept { return order_; }
  std::size_t rank_bound() const noexcept { return rank_bound_; }

 private:
  std::size_t order_;
  std::size_t rank_bound_;
};

/// Nearest point of C1: known entries overwritten, the rest clamped at zero.
inline Matrix project_data(const Matrix& x, const DataConstraint& c) {
  if (!x.is_square() || x.order() != c.order())
    throw InvalidInput("project_data: order mismatch");
  const std::size_t m = x.order();
  Matrix out(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out(i, j) = c.partial.known(i, j) ? c.partial.value(i, j) : std::max(0.0, x(i, j));
  return out;
}

/// U diag(l1+, ..., lq+, 0, ..., 0) U^T. Repeated eigenvalues straddling the
/// cut are resolved by the eigensolver's deterministic ordering.
inline Matrix project_rank_psd(const Matrix& s, std::size_t q) {
  if (!s.is_square()) throw InvalidInput("project_rank_psd requires a square matrix");
  if (q < 1 || q > s.order()) throw InvalidInput("project_rank_psd: rank out of range");
  const auto eig = symmetric_eig(s);
  std::vector<double> kept(eig.order(), 0.0);
  for (std::size_t k = 0; k < q; ++k) kept[k] = std::max(0.0, eig.eigenvalues[k]);
  return eig.reconstruct(kept);
}

/// Nearest point of C2: replace xhat by its rank-q PSD projection and keep
/// d and delta.
inline Matrix project_rank_edm(const Matrix& x, const RankEdmConstraint& c) {
  if (!x.is_square() || x.order() != c.order())
    throw InvalidInput("project_rank_edm: order mismatch");
  auto blocks = split_blocks(symmetrize(x));
  if (!blocks.xhat.all_finite())
    throw NumericalFailure("project_rank_edm: overflow in Householder conjugation");
  blocks.xhat = project_rank_psd(blocks.xhat, c.rank_bound());
  return assemble_blocks(blocks);
}

/// R_C x = 2 P_C x - x, given P_C x.
inline Matrix reflect(const Matrix& proj_output, const Matrix& x) {
  if (!proj_output.same_shape(x)) throw InvalidInput("reflect: shape mismatch");
  Matrix out = proj_output;
  out *= 2.0;
  out -= x;
  return out;
}

}  // namespace edmdr
