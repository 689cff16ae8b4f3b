#include <sstream>

#include <gtest/gtest.h>

#include "pldc/lp.hpp"
#include "support.hpp"

using namespace pldc;
using pldc::testing::random_instance;
using pldc::testing::vec;

TEST(Barrier, ActiveQuadratic) {
  // min w^2 s.t. w >= 1
  ConvexProgram p;
  p.quadratic = Eigen::MatrixXd::Constant(1, 1, 2.0);
  p.linear = vec({0});
  p.ineq_matrix = RowMatrix::Constant(1, 1, -1.0);
  p.ineq_rhs = vec({-1});
  const SolveResult r = solve(p);
  ASSERT_EQ(r.status, SolveStatus::optimal);
  EXPECT_NEAR(r.w[0], 1.0, 1e-7);
  EXPECT_NEAR(r.objective, 1.0, 1e-7);
}

ConvexProgram box_program(Sense sense) {
  // max w1 - w2 s.t. |w1| <= 1, |w2| <= 1
  ConvexProgram p;
  p.linear = sense == Sense::maximize ? vec({1, -1}) : vec({-1, 1});
  p.sense = sense;
  p.ineq_matrix = RowMatrix(4, 2);
  p.ineq_matrix << 1, 0, -1, 0, 0, 1, 0, -1;
  p.ineq_rhs = vec({1, 1, 1, 1});
  return p;
}

TEST(Barrier, BoxLp) {
  const SolveResult r = solve(box_program(Sense::maximize));
  ASSERT_EQ(r.status, SolveStatus::optimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-8);
}

TEST(Barrier, MaximizeEqualsNegatedMinimize) {
  const SolveResult a = solve(box_program(Sense::maximize));
  const SolveResult b = solve(box_program(Sense::minimize));
  EXPECT_NEAR(a.objective, -b.objective, 1e-10);
}

TEST(Barrier, InfeasibleAndUnbounded) {
  ConvexProgram p;
  p.linear = vec({1});
  p.ineq_matrix = RowMatrix(2, 1);
  p.ineq_matrix << 1, -1;
  p.ineq_rhs = vec({-1, -1});  // w <= -1 and w >= 1
  EXPECT_EQ(solve(p).status, SolveStatus::infeasible);

  ConvexProgram q;
  q.linear = vec({-1});
  q.ineq_matrix = RowMatrix::Constant(1, 1, -1.0);
  q.ineq_rhs = vec({0});  // min -w s.t. w >= 0
  EXPECT_EQ(solve(q).status, SolveStatus::unbounded);
}

TEST(Barrier, KktCertificate) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset data = random_instance(seed, 5, 2);
    const double tol = 1e-9;
    const SrmSolution s = solve_srm(data, 0.4, Loss::squared, LMode::scalar, tol);
    EXPECT_LE(s.raw.kkt_residual, 10.0 * tol);
    EXPECT_LE(s.raw.max_violation, 1e-9);
  }
}

TEST(Barrier, Deterministic) {
  const Dataset data = random_instance(4, 5, 1);
  const SrmSolution a = solve_srm(data, 0.4, Loss::absolute, LMode::scalar);
  const SrmSolution b = solve_srm(data, 0.4, Loss::absolute, LMode::scalar);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_TRUE(a.raw.w == b.raw.w);
}

TEST(Srm, VariableAndRowCounts) {
  const Index n = 5, d = 3;
  const Dataset data = random_instance(5, n, d);
  const ConvexProgram p = build_srm_program(data, 0.1, Loss::squared, LMode::scalar);
  EXPECT_EQ(p.num_vars(), 2 * n * (2 * d + 1) + 1);
  // 2n(n-1) interpolation rows plus the budget and sign rows.
  EXPECT_GE(p.num_constraints(), 2 * n * (n - 1));
  std::ostringstream dump;
  dump_program(p, dump);
  EXPECT_EQ(dump.str().rfind("pldc-program", 0), 0u);
}

TEST(Srm, TwoPointSymmetry) {
  RowMatrix x(2, 1);
  x << -1, 1;
  const Dataset data(x, vec({-1, 1}));
  const SrmSolution s = solve_srm(data, 0.5, Loss::squared, LMode::scalar);
  EXPECT_NEAR(s.witness.yhat[0], -s.witness.yhat[1], 1e-7);
}

TEST(Srm, WitnessInterpolates) {
  const Dataset data = random_instance(6, 5, 2);
  const SrmSolution s = solve_srm(data, 0.2, Loss::squared, LMode::scalar, 1e-10);
  EXPECT_LE(interpolation_violation(data.x(), s.witness), 1e-9);
  const PLDCModel m = build_from_witness(data.x(), s.witness.yhat, s.witness.z, s.witness.a, s.witness.b);
  for (Index i = 0; i < data.n(); ++i) EXPECT_NEAR(m.evaluate(data.x().row(i).transpose()), s.witness.yhat[i], 1e-9);
}

TEST(Srm, ScalarBudgetNeverBelowPerCoordinateSum) {
  // Per-coordinate budgets charge lambda * sum_d L_d >= lambda * max row l1,
  // so the scalar program is a relaxation of the per-coordinate one.
  const Dataset data = random_instance(7, 5, 2);
  const double scalar = solve_srm(data, 0.3, Loss::squared, LMode::scalar).objective;
  const double coord = solve_srm(data, 0.3, Loss::squared, LMode::per_coordinate).objective;
  EXPECT_LE(scalar, coord + 1e-8);
}
