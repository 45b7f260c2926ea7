#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "edmdr/solver.hpp"
#include "test_support.hpp"

namespace edmdr {
namespace {

// Toy sets in R^2, points stored as 1 x 2 matrices.
Matrix pt(double a, double b) { return Matrix::row({a, b}); }

Matrix onto_x_axis(const Matrix& x) { return pt(x(0, 0), 0.0); }
Matrix onto_y_axis(const Matrix& x) { return pt(0.0, x(0, 1)); }

Projection onto_horizontal_line(double height) {
  return [height](const Matrix& x) { return pt(x(0, 0), height); };
}

Matrix onto_unit_ball(const Matrix& x) {
  const double n = frobenius_norm(x);
  return n <= 1.0 ? x : x * (1.0 / n);
}

SolverConfig config(double eps = 1e-5, std::size_t max_iters = 200000, std::size_t period = 1) {
  SolverConfig c;
  c.epsilon = eps;
  c.max_iters = max_iters;
  c.period = period;
  return c;
}

TEST(DouglasRachford, CrossingLinesOneUpdate) {
  // p0 = (1,0), r0 = P_B(1,-1) = (0,-1), x1 = (1,1) + (0,-1) - (1,0) = (0,0)
  const FeasibilityPair pair{onto_x_axis, onto_y_axis};
  const auto one = douglas_rachford(pair, pt(1, 1), config(1e-5, 1));
  EXPECT_EQ(one.iterations, 1u);
  EXPECT_EQ(one.iterate, pt(0, 0));
  EXPECT_EQ(one.shadow, pt(0, 0));

  const auto full = douglas_rachford(pair, pt(1, 1), config());
  EXPECT_EQ(full.terminated, Termination::Converged);
  EXPECT_EQ(full.shadow, pt(0, 0));
  EXPECT_EQ(full.iterations, 2u);
}

TEST(DouglasRachford, BallAndLineReachesFixedPoint) {
  // p0 = (1,0), 2p0 - x0 = (0,0), r0 = (0,0), x1 = (1,0) which is fixed.
  const FeasibilityPair pair{onto_unit_ball, onto_horizontal_line(0.0)};
  const auto res = douglas_rachford(pair, pt(2, 0), config());
  EXPECT_EQ(res.terminated, Termination::Converged);
  EXPECT_LE(res.iterations, 2u);
  EXPECT_EQ(res.iterate, pt(1, 0));
  EXPECT_EQ(res.shadow, pt(1, 0));
  EXPECT_EQ(res.trace.back().relative_error, 0.0);
}

TEST(DouglasRachford, StartInIntersectionConvergesAtFirstCheck) {
  const FeasibilityPair pair{onto_unit_ball, onto_horizontal_line(0.25)};
  const auto res = douglas_rachford(pair, pt(0.5, 0.25), config());
  EXPECT_EQ(res.terminated, Termination::Converged);
  ASSERT_EQ(res.trace.size(), 1u);
  EXPECT_EQ(res.trace[0].relative_error, 0.0);
  EXPECT_EQ(res.trace[0].relative_error_db, -std::numeric_limits<double>::infinity());
}

TEST(DouglasRachford, ProjectionCountsAndTraceLength) {
  int a_calls = 0, b_calls = 0;
  const FeasibilityPair pair{[&](const Matrix& x) { ++a_calls; return onto_unit_ball(x); },
                             [&](const Matrix& x) {
                               ++b_calls;
                               return onto_horizontal_line(0.5)(x);
                             }};
  const auto res = douglas_rachford(pair, pt(3, -2), config(1e-12));
  EXPECT_EQ(res.trace.size(), res.iterations);
  EXPECT_EQ(static_cast<std::size_t>(b_calls), res.iterations);
  EXPECT_EQ(res.b_projection_count, res.iterations);
  // one extra P_A for p_0
  EXPECT_EQ(static_cast<std::size_t>(a_calls), res.iterations + 1);
}

TEST(DouglasRachford, ConsistentConvexInstanceConverges) {
  Rng rng(77);
  const FeasibilityPair pair{onto_unit_ball, onto_horizontal_line(0.5)};
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x0 = pt(rng.uniform(-5, 5), rng.uniform(-5, 5));
    const auto res = douglas_rachford(pair, x0, config(1e-13));
    ASSERT_EQ(res.terminated, Termination::Converged);
    EXPECT_LE(res.trace.back().gap_norm, 1e-8);
    // shadow in A and in B
    EXPECT_LE(frobenius_norm(res.shadow), 1.0 + 1e-8);
    EXPECT_NEAR(res.shadow(0, 1), 0.5, 1e-8);
    // ||x_{n+1} - x_n|| = gap_n is nonincreasing for convex sets
    for (std::size_t n = 1; n < res.trace.size(); ++n)
      EXPECT_LE(res.trace[n].gap_norm, res.trace[n - 1].gap_norm + 1e-12);
  }
}

TEST(DouglasRachford, ParallelLinesGapVector) {
  const FeasibilityPair pair{onto_horizontal_line(0.0), onto_horizontal_line(0.5)};
  const auto res = douglas_rachford(pair, pt(1, 0.2), config(1e-5, 10000));
  EXPECT_EQ(res.terminated, Termination::MaxIters);
  EXPECT_EQ(res.iterations, 10000u);
  EXPECT_NEAR(res.trace.back().gap_norm, 0.5, 1e-8);
  EXPECT_NEAR(frobenius_norm(res.iterate), std::hypot(1.0, 0.2 + 0.5 * 10000), 1e-6);
}

TEST(DouglasRachford, RunningMinimumReachesTolerance) {
  const FeasibilityPair pair{onto_unit_ball, onto_horizontal_line(0.9)};
  const auto res = douglas_rachford(pair, pt(-3, 4), config());
  ASSERT_EQ(res.terminated, Termination::Converged);
  double running = std::numeric_limits<double>::infinity();
  for (const auto& t : res.trace) {
    const double next = std::min(running, t.relative_error);
    EXPECT_LE(next, running);
    running = next;
  }
  EXPECT_LE(running, 1e-5);
  EXPECT_EQ(running, res.trace.back().relative_error);
}

TEST(DouglasRachford, Deterministic) {
  const FeasibilityPair pair{onto_unit_ball, onto_horizontal_line(0.3)};
  const auto a = douglas_rachford(pair, pt(2.5, -1.5), config());
  const auto b = douglas_rachford(pair, pt(2.5, -1.5), config());
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t n = 0; n < a.trace.size(); ++n) {
    EXPECT_EQ(a.trace[n].relative_error, b.trace[n].relative_error);
    EXPECT_EQ(a.trace[n].gap_norm, b.trace[n].gap_norm);
  }
  EXPECT_EQ(a.shadow, b.shadow);
}

TEST(DouglasRachford, InvalidConfig) {
  const FeasibilityPair pair{onto_x_axis, onto_y_axis};
  EXPECT_THROW(douglas_rachford(pair, pt(1, 1), config(0.0)), InvalidInput);
  EXPECT_THROW(douglas_rachford(pair, pt(1, 1), config(1e-5, 0)), InvalidInput);
  EXPECT_THROW(douglas_rachford(pair, pt(1, 1), config(1e-5, 10, 2)), InvalidInput);
  EXPECT_THROW(douglas_rachford_periodic(pair, pt(1, 1), config(1e-5, 10, 0)), InvalidInput);
  EXPECT_THROW(douglas_rachford(FeasibilityPair{onto_x_axis, {}}, pt(1, 1), config()),
               InvalidInput);
}

TEST(DouglasRachford, NonFiniteIterateReportsIteration) {
  const FeasibilityPair pair{[](const Matrix& x) { return x; },
                             [](const Matrix& x) { return x * 1e200; }};
  try {
    douglas_rachford(pair, pt(1, 1), config());
    FAIL() << "expected NumericalFailure";
  } catch (const NumericalFailure& e) {
    EXPECT_GE(e.iteration(), 1u);
    EXPECT_LE(e.iteration(), 3u);
  }
}

TEST(PeriodicDouglasRachford, PeriodOneMatchesBasic) {
  const FeasibilityPair pair{onto_unit_ball, onto_horizontal_line(0.7)};
  const auto a = douglas_rachford(pair, pt(-2, 3), config());
  const auto b = douglas_rachford_periodic(pair, pt(-2, 3), config());
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t n = 0; n < a.trace.size(); ++n) {
    EXPECT_EQ(a.trace[n].relative_error, b.trace[n].relative_error);
    EXPECT_EQ(a.trace[n].gap_norm, b.trace[n].gap_norm);
  }
  EXPECT_EQ(a.b_projection_count, b.b_projection_count);
}

TEST(PeriodicDouglasRachford, AxesShadowStaysInIntersection) {
  // After the first update the shadow is (0,0) in A and B; with T = 3 the
  // stale r keeps pushing x along the y-axis, so only the shadow settles.
  int b_calls = 0;
  const FeasibilityPair pair{onto_x_axis, [&](const Matrix& x) {
                               ++b_calls;
                               return onto_y_axis(x);
                             }};
  const auto res = douglas_rachford_periodic(pair, pt(1, 1), config(1e-5, 30, 3));
  EXPECT_LE(frobenius_norm(res.shadow), 1e-9);
  EXPECT_EQ(res.b_projection_count, 10u);
  EXPECT_EQ(static_cast<std::size_t>(b_calls), 10u);
}

TEST(PeriodicDouglasRachford, StaleTraceUsesStoredR) {
  const FeasibilityPair pair{onto_unit_ball, onto_horizontal_line(0.2)};
  const auto res = douglas_rachford_periodic(pair, pt(3, 1), config(1e-30, 7, 3));
  EXPECT_EQ(res.b_projection_count, 3u);  // n = 0, 3, 6
  ASSERT_EQ(res.trace.size(), 7u);
  for (std::size_t n = 0; n < 7; ++n) EXPECT_EQ(res.trace[n].iteration, n);
}

TEST(PeriodicDouglasRachford, EdmInstanceProjectionBudget) {
  const auto inst = testing::desk_instance();
  const auto pair = edm_feasibility_pair(inst.partial, 3);
  for (std::size_t period : {2u, 3u, 5u}) {
    const auto res = douglas_rachford_periodic(pair, initial_point(inst.partial, 0),
                                               config(1e-5, 200, period));
    EXPECT_EQ(res.b_projection_count, (res.iterations + period - 1) / period);
  }
}

TEST(RelativeErrorDb, Values) {
  // ||r - p|| / ||p|| = 1e-5 -> -100 dB
  EXPECT_NEAR(relative_error_db(pt(1.0 + 1e-5, 0.0), pt(1.0, 0.0)), -100.0, 1e-6);
  EXPECT_EQ(relative_error_db(pt(2, 3), pt(2, 3)), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(relative_error_db(pt(1, 1), pt(0, 0)), -std::numeric_limits<double>::infinity());
  EXPECT_NEAR(relative_error_db(pt(0, 1), pt(1, 0)), 10.0 * std::log10(2.0), 1e-12);
  EXPECT_NEAR(relative_error_db(pt(2, 0), pt(1, 0)), 0.0, 1e-15);
}

}  // namespace
}  // namespace edmdr
