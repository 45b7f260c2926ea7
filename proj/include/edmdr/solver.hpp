#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "edmdr/error.hpp"
#include "edmdr/linalg.hpp"
#include "edmdr/matrix.hpp"
#include "edmdr/projections.hpp"

namespace edmdr {

using Projection = std::function<Matrix(const Matrix&)>;

/// Two projection operators; the solver looks for a point of A and B.
/// The shadow sequence lives in A. B should carry the expensive projection
/// since the periodic variant skips it.
struct FeasibilityPair {
  Projection proj_a;
  Projection proj_b;
};

struct SolverConfig {
  double epsilon = 1e-5;
  std::size_t max_iters = 200000;
  std::size_t period = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
    if (max_iters < 1) throw InvalidInput("max_iters must be at least 1");
    if (period < 1) throw InvalidInput("period must be at least 1");
  }
};

enum class Termination { Converged, MaxIters };

inline const char* to_string(Termination t) noexcept {
  return t == Termination::Converged ? "converged" : "max_iters";
}

struct TraceRecord {
  std::size_t iteration = 0;
  double relative_error = 0.0;
  double relative_error_db = 0.0;
  double gap_norm = 0.0;
};

struct SolverResult {
  Matrix shadow;
  Matrix iterate;
  std::size_t iterations = 0;
  Termination terminated = Termination::MaxIters;
  std::vector<TraceRecord> trace;
  std::size_t b_projection_count = 0;

  double final_relative_error() const {
    return trace.empty() ? std::numeric_limits<double>::infinity()
                         : trace.back().relative_error;
  }
};

namespace detail {

// ||r - p|| / ||p||, with 0/0 read as 0 (r = p = 0 is a solution).
inline double relative_gap(double gap, double pnorm) {
  if (gap == 0.0) return 0.0;
  if (pnorm == 0.0) return std::numeric_limits<double>::infinity();
  return gap / pnorm;
}

inline double decibels(double gap, double pnorm) {
  if (pnorm == 0.0 || gap == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10((gap * gap) / (pnorm * pnorm));
}

inline SolverResult run_douglas_rachford(const FeasibilityPair& pair, const Matrix& x0,
                                         const SolverConfig& cfg) {
  cfg.validate();
  if (!pair.proj_a || !pair.proj_b) throw InvalidInput("feasibility pair is incomplete");
  if (!x0.all_finite()) throw InvalidInput("initial point has non-finite entries");

  SolverResult res;
  Matrix x = x0;
  Matrix p = pair.proj_a(x);
  Matrix r;
  if (!p.all_finite()) throw NumericalFailure("non-finite shadow", 0);

  res.trace.reserve(std::min<std::size_t>(cfg.max_iters, 1 << 16));
  std::size_t n = 0;
  while (true) {
    if (n % cfg.period == 0) {
      try {
        r = pair.proj_b(reflect(p, x));
      } catch (const NumericalFailure& e) {
        throw NumericalFailure(e.what(), n);
      }
      ++res.b_projection_count;
      if (!r.same_shape(x)) throw InvalidInput("projection changed the matrix shape");
    }
    const double gap = frobenius_distance(r, p);
    const double pnorm = frobenius_norm(p);
    const double rel = relative_gap(gap, pnorm);
    res.trace.push_back({n, rel, decibels(gap, pnorm), gap});

    // x_{n+1} = x_n + r_n - p_n
    x += r;
    x -= p;
    ++n;
    if (!x.all_finite()) throw NumericalFailure("non-finite iterate at iteration " + std::to_string(n), n);
    p = pair.proj_a(x);
    if (!p.all_finite())
      throw NumericalFailure("non-finite iterate at iteration " + std::to_string(n), n);

    if (rel <= cfg.epsilon) {
      res.terminated = Termination::Converged;
      break;
    }
    if (n >= cfg.max_iters) {
      res.terminated = Termination::MaxIters;
      break;
    }
  }
  res.iterations = n;
  res.shadow = std::move(p);
  res.iterate = std::move(x);
  return res;
}

}  // namespace detail

/// Douglas-Rachford iteration in the memory-saving form
///   p_n = P_A x_n,  r_n = P_B(2 p_n - x_n),  x_{n+1} = x_n + r_n - p_n.
/// Iteration n records ||r_n - p_n|| / ||p_n|| and stops after the update
/// once that ratio is at most epsilon. The returned shadow is P_A of the last
/// iterate.
inline SolverResult douglas_rachford(const FeasibilityPair& pair, const Matrix& x0,
                                     const SolverConfig& cfg) {
  if (cfg.period != 1) throw InvalidInput("douglas_rachford expects period 1");
  return detail::run_douglas_rachford(pair, x0, cfg);
}

/// Variant that refreshes r_n = P_B(2 p_n - x_n) only when n mod T == 0 and
/// reuses the stored r otherwise. The stopping test uses the stored r, as do
/// the trace records. T = 1 is the plain method.
inline SolverResult douglas_rachford_periodic(const FeasibilityPair& pair,
                                              const Matrix& x0,
                                              const SolverConfig& cfg) {
  return detail::run_douglas_rachford(pair, x0, cfg);
}

/// 10 log10(||r - p||^2 / ||p||^2). Returns -infinity when ||p|| = 0 or r = p.
inline double relative_error_db(const Matrix& r, const Matrix& p) {
  return detail::decibels(frobenius_distance(r, p), frobenius_norm(p));
}

}  // namespace edmdr
