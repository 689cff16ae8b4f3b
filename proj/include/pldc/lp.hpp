#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pldc/admm.hpp"
#include "pldc/core.hpp"
#include "pldc/dataset.hpp"

namespace pldc {

enum class Sense { minimize, maximize };

/// objective(w) = 0.5 w^T Q w + c^T w + constant, subject to G w <= h.
///
/// `quadratic` may be left empty (0 x 0) for a linear program. Maximisation
/// is only allowed for linear objectives.
struct ConvexProgram {
  Eigen::MatrixXd quadratic;
  Vector linear;
  RowMatrix ineq_matrix;
  Vector ineq_rhs;
  Sense sense = Sense::minimize;
  double constant = 0.0;

  /// Strictly feasible start, if the builder knows one. Otherwise Phase I.
  std::optional<Vector> start;

  /// Directions along which both the objective and every constraint are
  /// constant (gauge freedoms). Newton steps are taken orthogonal to them.
  std::vector<Vector> invariant_directions;

  /// Optional structure hint: groups of variables that interact, in the
  /// Hessian, only with themselves and with the variables in no group.
  /// Lets Newton steps eliminate each group before a small dense solve.
  std::vector<std::vector<Index>> blocks;

  /// Expected magnitude of the optimal value. When positive it sets the
  /// initial barrier weight and the gap target is tol * objective_scale;
  /// otherwise the scale is max(1, |objective(start)|) and the target is tol.
  double objective_scale = 0.0;

  Index num_vars() const { return linear.size(); }
  Index num_constraints() const { return ineq_matrix.rows(); }
  double evaluate(const Vector& w) const;
  void validate() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

std::string to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::numerical_failure;
  Vector w;
  double objective = 0.0;
  /// Inequality multipliers at the returned point (minimisation form).
  Vector duals;
  /// m / t at exit: bound on the distance to the optimal value.
  double gap = 0.0;
  double max_violation = 0.0;
  /// max(|Q w + c + G^T duals|_inf, max_i duals_i * slack_i).
  double kkt_residual = 0.0;
  int newton_steps = 0;
  int outer_steps = 0;
};

struct BarrierOptions {
  double mu = 10.0;
  double newton_tol = 1e-10;
  int max_newton = 200;
  int max_outer = 60;
};

/// Log-barrier interior-point method with Newton inner steps. `tol` bounds
/// the duality gap relative to the objective scale estimated at the start
/// point; the returned point is strictly feasible.
SolveResult solve(const ConvexProgram& prog, double tol = 1e-9, const BarrierOptions& options = {});

/// Plain-text dump: header line "pldc-program <vars> <rows> <sense>", then
/// the quadratic (dense rows, or "Q 0" when empty), "c" and the linear
/// coefficients, "constant", then one line per constraint "g_1 ... g_v <= h".
void dump_program(const ConvexProgram& prog, std::ostream& out);

enum class LMode { scalar, per_coordinate };

/// Variable offsets of the fit program:
/// [yhat (n), z (n), a+ (n d), a- (n d), b+ (n d), b- (n d), L (1 or d), e (n)]
/// with e present only for absolute and hinge loss.
struct SrmLayout {
  Index n = 0, d = 0;
  LMode mode = LMode::scalar;
  bool slacks = false;

  Index yhat(Index i) const { return i; }
  Index z(Index i) const { return n + i; }
  Index a_pos(Index i, Index k) const { return 2 * n + i * d + k; }
  Index a_neg(Index i, Index k) const { return 2 * n + n * d + i * d + k; }
  Index b_pos(Index i, Index k) const { return 2 * n + 2 * n * d + i * d + k; }
  Index b_neg(Index i, Index k) const { return 2 * n + 3 * n * d + i * d + k; }
  Index budget(Index k) const { return 2 * n + 4 * n * d + (mode == LMode::scalar ? 0 : k); }
  Index num_budget() const { return mode == LMode::scalar ? 1 : d; }
  Index slack(Index i) const { return 2 * n + 4 * n * d + num_budget() + i; }
  Index num_vars() const { return 2 * n + 4 * n * d + num_budget() + (slacks ? n : 0); }
};

/// Fit program over (yhat, z, a, b, L): loss + lambda * L (scalar budget) or
/// loss + lambda * sum_d L_d (per-coordinate budget), with the pairwise
/// interpolation constraints for i != j and |a_i|_1 + |b_i|_1 <= L (resp.
/// |a_id| + |b_id| <= L_d). The l1 norms are split into positive and
/// negative parts. Requires lambda > 0 so the program is bounded.
ConvexProgram build_srm_program(const Dataset& data, double lambda, Loss loss, LMode mode);

struct SrmSolution {
  SolveResult raw;
  Witness witness;
  Vector L;
  double objective = 0.0;
};

/// Solves build_srm_program and unpacks the witness.
SrmSolution solve_srm(const Dataset& data, double lambda, Loss loss, LMode mode, double tol = 1e-9);

/// Largest violation of the pairwise interpolation constraints by a witness
/// (0 when feasible).
double interpolation_violation(const RowMatrix& x, const Witness& w);

}  // namespace pldc
