#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pldc/core.hpp"
#include "pldc/dataset.hpp"

namespace pldc {

enum class Loss { squared, absolute, hinge };

std::string to_string(Loss loss);
Loss parse_loss(const std::string& name);  // "l2"/"squared", "l1"/"absolute", "hinge"

/// Serial loops straight off the printed updates, or the OpenMP version that
/// regroups the pairwise sums into matrix products. Both produce the same
/// iterates up to rounding.
enum class Backend { reference, parallel };

/// Which response enters the constant part of A_i: the observed y_j as
/// printed, or the current fit yhat_j. They coincide after the first sweep
/// because the yhat update preserves sum(yhat) = sum(y).
enum class ATerm { observed, fitted };

struct FitConfig {
  double lambda = 0.0;
  double rho = 0.01;
  int max_iters = 50000;
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  Loss loss = Loss::squared;
  Backend backend = Backend::parallel;
  ATerm a_term = ATerm::observed;

  void validate() const;
};

/// Variable roster of the sweep. Pairwise arrays are row-major n x n with
/// entry (i, j) belonging to the constraint between points i and j.
struct AdmmState {
  Vector yhat, z;
  RowMatrix a, b, p, q, eta, zeta, u, gamma;
  RowMatrix s, t, alpha, beta;
  Vector L;
  std::vector<Eigen::MatrixXd> Lambda;
  double rho = 0.01;
  double lambda = 0.0;

  /// Zeros everywhere, Lambda_i precomputed from x.
  static AdmmState initial(const RowMatrix& x, double rho, double lambda);

  /// A state whose splitting variables are consistent with the given
  /// witness: p = a, q = b, L_d = max_i |a_id| + |b_id|, slacks set to the
  /// constraint gaps (clamped at zero), duals zero.
  static AdmmState from_witness(const RowMatrix& x, const Witness& w, double rho, double lambda);
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
};

struct FitReport {
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  double loss = 0.0;
  /// max_{i,d} |p_id| + |q_id| + u_id - L_d at exit.
  double budget_gap = 0.0;
  std::string variant;
};

/// Runs the sweep one iteration at a time. Exclusive use; not thread-safe.
class AdmmSolver {
 public:
  AdmmSolver(const Dataset& data, FitConfig config);

  /// One full sweep. Returns the residuals of this iteration.
  Residuals step();

  const AdmmState& state() const { return state_; }
  const FitConfig& config() const { return config_; }
  int iterations() const { return iterations_; }
  Residuals last_residuals() const { return last_; }

  /// Loss plus lambda * sum_d L_d at the current iterate.
  double objective() const;
  double loss_value() const;

  /// Augmented Lagrangian of the split program at the current iterate.
  double augmented_lagrangian() const;

  /// Runs until both residuals fall below tolerance or max_iters is hit.
  /// The observer, if set, sees the state after each sweep.
  FitReport run(const std::function<void(const AdmmSolver&)>& observer = {});

  PLDCModel model() const;

 private:
  // Each returns the primal residual of the sweep.
  double sweep_reference();
  double sweep_parallel();
  void update_yhat_z(const Vector& A, const Vector& B);

  Dataset data_;
  FitConfig config_;
  AdmmState state_;
  RowMatrix xt_;  // d x n copy for the parallel products
  Vector x_sum_;
  double y_sum_ = 0.0;
  int iterations_ = 0;
  Residuals last_;
};

/// Max violation of the split equality constraints at the state's current
/// values (primal) and, for dual, the supplied previous-iterate change.
double primal_residual(const AdmmState& state, const RowMatrix& x);
Residuals residuals(const AdmmState& state, const Dataset& data, double dual_change = 0.0);

/// Dispatches on config.loss.
std::pair<PLDCModel, FitReport> fit(const Dataset& data, FitConfig config);
std::pair<PLDCModel, FitReport> fit_absolute(const Dataset& data, FitConfig config);
std::pair<PLDCModel, FitReport> fit_hinge_binary(const Dataset& data, FitConfig config);

/// Proximal maps used by the yhat block, exposed for testing.
/// prox_tau(v) = argmin_w loss(w) + (w - v)^2 / (2 tau).
double prox_absolute(double v, double y, double tau);
double prox_hinge(double v, double y, double tau);

/// Solves the coupled yhat subproblem for absolute or hinge loss:
///   min sum_i loss_i(w_i) + (rho n / 2)|w|^2 - (rho / 2)(sum w)^2 - c^T w.
Vector solve_coupled_prox(const Vector& c, const Vector& y, double rho, Loss loss);

}  // namespace pldc
