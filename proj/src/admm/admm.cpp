#include <algorithm>
#include <cmath>

#include "pldc/admm.hpp"
#include "pldc/error.hpp"

namespace pldc {

std::string to_string(Loss loss) {
  switch (loss) {
    case Loss::squared: return "l2";
    case Loss::absolute: return "l1";
    case Loss::hinge: return "hinge";
  }
  return "?";
}

Loss parse_loss(const std::string& name) {
  if (name == "l2" || name == "squared") return Loss::squared;
  if (name == "l1" || name == "absolute") return Loss::absolute;
  if (name == "hinge") return Loss::hinge;
  throw Error("unknown loss '" + name + "' (expected l2, l1 or hinge)");
}

void FitConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("lambda must be a finite non-negative number");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error("rho must be positive");
  if (max_iters < 1) throw Error("max_iters must be at least 1");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) throw Error("tolerances must be positive");
}

AdmmState AdmmState::initial(const RowMatrix& x, double rho, double lambda) {
  const Index n = x.rows();
  const Index d = x.cols();
  AdmmState st;
  st.rho = rho;
  st.lambda = lambda;
  st.yhat = Vector::Zero(n);
  st.z = Vector::Zero(n);
  for (RowMatrix* m : {&st.a, &st.b, &st.p, &st.q, &st.eta, &st.zeta, &st.u, &st.gamma}) *m = RowMatrix::Zero(n, d);
  for (RowMatrix* m : {&st.s, &st.t, &st.alpha, &st.beta}) *m = RowMatrix::Zero(n, n);
  st.L = Vector::Zero(d);

  const Eigen::VectorXd sum = x.colwise().sum().transpose();
  const Eigen::MatrixXd gram = x.transpose() * x;
  st.Lambda.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    Eigen::MatrixXd m = static_cast<double>(n) * xi * xi.transpose() - xi * sum.transpose() - sum * xi.transpose() +
                        gram + Eigen::MatrixXd::Identity(d, d);
    // m = sum_j (x_i - x_j)(x_i - x_j)^T + I, so LLT always succeeds.
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    st.Lambda.push_back(llt.solve(Eigen::MatrixXd::Identity(d, d)));
  }
  return st;
}

AdmmState AdmmState::from_witness(const RowMatrix& x, const Witness& w, double rho, double lambda) {
  AdmmState st = initial(x, rho, lambda);
  const Index n = x.rows();
  st.yhat = w.yhat;
  st.z = w.z;
  st.a = w.a;
  st.b = w.b;
  st.p = w.a;
  st.q = w.b;
  const RowMatrix budget = w.a.cwiseAbs() + w.b.cwiseAbs();
  st.L = budget.colwise().maxCoeff().transpose();
  for (Index i = 0; i < n; ++i) st.u.row(i) = st.L.transpose() - budget.row(i);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Eigen::RowVectorXd dx = x.row(i) - x.row(j);
      const double gap1 = w.a.row(i).dot(dx) - (w.yhat[i] - w.yhat[j] + w.z[i] - w.z[j]);
      const double gap2 = w.b.row(i).dot(dx) - (w.z[i] - w.z[j]);
      st.s(i, j) = std::max(gap1, 0.0);
      st.t(i, j) = std::max(gap2, 0.0);
    }
  }
  return st;
}

double primal_residual(const AdmmState& st, const RowMatrix& x) {
  const Index n = x.rows();
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Eigen::RowVectorXd dx = x.row(i) - x.row(j);
      const double r1 = st.s(i, j) + st.yhat[i] - st.yhat[j] + st.z[i] - st.z[j] - st.a.row(i).dot(dx);
      const double r2 = st.t(i, j) + st.z[i] - st.z[j] - st.b.row(i).dot(dx);
      worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
  }
  const RowMatrix budget = st.u + st.p.cwiseAbs() + st.q.cwiseAbs();
  for (Index i = 0; i < n; ++i) {
    worst = std::max(worst, (budget.row(i) - st.L.transpose()).cwiseAbs().maxCoeff());
  }
  if (st.a.size() > 0) {
    worst = std::max(worst, (st.a - st.p).cwiseAbs().maxCoeff());
    worst = std::max(worst, (st.b - st.q).cwiseAbs().maxCoeff());
  }
  return worst;
}

Residuals residuals(const AdmmState& state, const Dataset& data, double dual_change) {
  return Residuals{primal_residual(state, data.x()), dual_change};
}

AdmmSolver::AdmmSolver(const Dataset& data, FitConfig config) : data_(data), config_(config) {
  config_.validate();
  if (data_.n() < 2) throw DataError("fitting needs at least 2 points, got " + std::to_string(data_.n()));
  if (config_.loss == Loss::hinge) {
    for (Index i = 0; i < data_.n(); ++i) {
      if (data_.y()[i] != 1.0 && data_.y()[i] != -1.0) {
        throw DataError("hinge loss needs labels in {-1, +1}; row " + std::to_string(i) + " has " +
                        std::to_string(data_.y()[i]));
      }
    }
  }
  state_ = AdmmState::initial(data_.x(), config_.rho, config_.lambda);
  xt_ = data_.x().transpose();
  x_sum_ = data_.x().colwise().sum().transpose();
  y_sum_ = data_.y().sum();
}

void AdmmSolver::update_yhat_z(const Vector& Apair, const Vector& B) {
  auto& st = state_;
  const Index n = data_.n();
  const double nn = static_cast<double>(n);
  const double rho = config_.rho;
  const Vector& y = data_.y();

  if (config_.loss == Loss::squared) {
    const double shift = 2.0 * (config_.a_term == ATerm::observed ? y_sum_ : st.yhat.sum());
    const Vector A = Apair.array() + shift;
    const double c = 2.0 + nn * rho;
    st.yhat = (2.0 / c) * y + (rho / (2.0 * c)) * A - (rho / (2.0 * c)) * B;
    st.z = (-1.0 / c) * y + A / (2.0 * nn * c) + ((1.0 + nn * rho) / (2.0 * nn * c)) * B;
    return;
  }
  const Vector c = 0.5 * rho * (Apair - B);
  st.yhat = solve_coupled_prox(c, y, rho, config_.loss);
  const double mean = st.yhat.mean();
  st.z = (Apair + B) / (4.0 * nn) - 0.5 * (st.yhat.array() - mean).matrix();
}

Residuals AdmmSolver::step() {
  const auto& st = state_;
  const Vector yhat0 = st.yhat, z0 = st.z, L0 = st.L;
  const RowMatrix a0 = st.a, b0 = st.b;

  const double primal = config_.backend == Backend::reference ? sweep_reference() : sweep_parallel();
  ++iterations_;

  double dual = (st.yhat - yhat0).cwiseAbs().maxCoeff();
  dual = std::max(dual, (st.z - z0).cwiseAbs().maxCoeff());
  dual = std::max(dual, (st.a - a0).cwiseAbs().maxCoeff());
  dual = std::max(dual, (st.b - b0).cwiseAbs().maxCoeff());
  dual = std::max(dual, (st.L - L0).cwiseAbs().maxCoeff());
  if (!std::isfinite(primal) || !std::isfinite(dual) || !st.yhat.allFinite() || !st.a.allFinite() ||
      !st.b.allFinite()) {
    throw DivergenceError("ADMM produced non-finite values at iteration " + std::to_string(iterations_));
  }
  last_ = Residuals{primal, dual};
  return last_;
}

double AdmmSolver::loss_value() const {
  const Vector& y = data_.y();
  const Vector& yh = state_.yhat;
  switch (config_.loss) {
    case Loss::squared: return (yh - y).squaredNorm();
    case Loss::absolute: return (yh - y).cwiseAbs().sum();
    case Loss::hinge: return (1.0 - y.cwiseProduct(yh).array()).max(0.0).sum();
  }
  return 0.0;
}

double AdmmSolver::objective() const { return loss_value() + config_.lambda * state_.L.sum(); }

double AdmmSolver::augmented_lagrangian() const {
  const auto& st = state_;
  const auto& x = data_.x();
  const Index n = data_.n();
  const double rho = config_.rho;
  double al = objective();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Eigen::RowVectorXd dx = x.row(i) - x.row(j);
      const double r1 = st.s(i, j) + st.yhat[i] - st.yhat[j] + st.z[i] - st.z[j] - st.a.row(i).dot(dx);
      const double r2 = st.t(i, j) + st.z[i] - st.z[j] - st.b.row(i).dot(dx);
      al += st.alpha(i, j) * r1 + 0.5 * rho * r1 * r1 + st.beta(i, j) * r2 + 0.5 * rho * r2 * r2;
    }
  }
  const RowMatrix r3 = st.u + st.p.cwiseAbs() + st.q.cwiseAbs() - Vector::Ones(n) * st.L.transpose();
  const RowMatrix r4 = st.a - st.p;
  const RowMatrix r5 = st.b - st.q;
  al += st.gamma.cwiseProduct(r3).sum() + 0.5 * rho * r3.squaredNorm();
  al += st.eta.cwiseProduct(r4).sum() + 0.5 * rho * r4.squaredNorm();
  al += st.zeta.cwiseProduct(r5).sum() + 0.5 * rho * r5.squaredNorm();
  return al;
}

FitReport AdmmSolver::run(const std::function<void(const AdmmSolver&)>& observer) {
  FitReport rep;
  while (iterations_ < config_.max_iters) {
    const Residuals r = step();
    if (observer) observer(*this);
    if (r.primal <= config_.tol_primal && r.dual <= config_.tol_dual) {
      rep.converged = true;
      break;
    }
  }
  const auto& st = state_;
  rep.iterations = iterations_;
  rep.primal_residual = last_.primal;
  rep.dual_residual = last_.dual;
  rep.loss = loss_value();
  rep.objective = objective();
  const RowMatrix gap = st.p.cwiseAbs() + st.q.cwiseAbs() + st.u - Vector::Ones(data_.n()) * st.L.transpose();
  rep.budget_gap = gap.size() > 0 ? gap.maxCoeff() : 0.0;
  rep.variant = config_.a_term == ATerm::observed ? "a-term=y" : "a-term=yhat";
  return rep;
}

PLDCModel AdmmSolver::model() const {
  const auto& st = state_;
  const PLDCModel raw = build_from_witness(data_.x(), st.yhat, st.z, st.a, st.b);
  FitRecord meta = raw.meta();
  meta.method = "admm";
  meta.loss = to_string(config_.loss);
  meta.lambda = config_.lambda;
  meta.rho = config_.rho;
  meta.iterations = iterations_;
  meta.primal_residual = last_.primal;
  meta.dual_residual = last_.dual;
  meta.objective = objective();
  meta.variant = config_.a_term == ATerm::observed ? "a-term=y" : "a-term=yhat";
  return PLDCModel(raw.phi1(), raw.phi2(), data_.standardizer(), std::move(meta));
}

std::pair<PLDCModel, FitReport> fit(const Dataset& data, FitConfig config) {
  AdmmSolver solver(data, config);
  FitReport rep = solver.run();
  return {solver.model(), rep};
}

std::pair<PLDCModel, FitReport> fit_absolute(const Dataset& data, FitConfig config) {
  config.loss = Loss::absolute;
  return fit(data, config);
}

std::pair<PLDCModel, FitReport> fit_hinge_binary(const Dataset& data, FitConfig config) {
  config.loss = Loss::hinge;
  return fit(data, config);
}

}  // namespace pldc
