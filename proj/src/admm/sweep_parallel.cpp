// Same sweep as sweep_reference.cpp, with the pairwise sums rewritten as
// matrix products. With P = a X^T (so P_ij = <a_i, x_j>),
//   sum_j <a_i + a_j, x_i - x_j> = n P_ii - rowsum(P)_i + colsum(P)_i - tr(P)
// and, for g_ij = G_ij + w_i - w_j,
//   sum_j g_ij (x_i - x_j) = (rowsum(G)_i + n w_i - sum(w)) x_i
//                            - (G X)_i - w_i sum_j x_j + X^T w.
// The elementwise blocks are split over rows with OpenMP.

#include <algorithm>
#include <cmath>

#include "pldc/admm.hpp"

namespace pldc {

namespace {

inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

inline double pos(double v) { return v > 0.0 ? v : 0.0; }

Vector pair_inner_sums(const RowMatrix& P) {
  const double n = static_cast<double>(P.rows());
  const Vector diag = P.diagonal();
  return n * diag - Vector(P.rowwise().sum()) + Vector(P.colwise().sum().transpose()) -
         Vector::Constant(P.rows(), diag.sum());
}

}  // namespace

double AdmmSolver::sweep_parallel() {
  auto& st = state_;
  const auto& x = data_.x();
  const Index n = data_.n();
  const Index d = data_.d();
  const double rho = config_.rho;
  const double nn = static_cast<double>(n);

  const RowMatrix AS = st.alpha + st.s;
  const RowMatrix BT = st.beta + st.t;
  const Vector as_row = AS.rowwise().sum();
  const Vector bt_row = BT.rowwise().sum();
  {
    const RowMatrix Pa = st.a * xt_;
    const RowMatrix Pb = st.b * xt_;
    const Vector A = Vector(AS.colwise().sum().transpose()) - as_row + pair_inner_sums(Pa);
    const Vector B = Vector(BT.colwise().sum().transpose()) - bt_row + pair_inner_sums(Pb);
    update_yhat_z(A, B);
  }

  const Vector w = st.yhat + st.z;
  const double w_sum = w.sum();
  const double z_sum = st.z.sum();
  const RowMatrix M = AS * x;
  const RowMatrix N = BT * x;
  const Vector wx = xt_ * w;
  const Vector zx = xt_ * st.z;

#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    const double ca = as_row[i] + nn * w[i] - w_sum;
    const double cb = bt_row[i] + nn * st.z[i] - z_sum;
    const Eigen::VectorXd va = (st.p.row(i) - st.eta.row(i)).transpose() + ca * xi - M.row(i).transpose() -
                               w[i] * x_sum_ + wx;
    const Eigen::VectorXd vb = (st.q.row(i) - st.zeta.row(i)).transpose() + cb * xi - N.row(i).transpose() -
                               st.z[i] * x_sum_ + zx;
    st.a.row(i) = (st.Lambda[static_cast<std::size_t>(i)] * va).transpose();
    st.b.row(i) = (st.Lambda[static_cast<std::size_t>(i)] * vb).transpose();
  }

  st.L = ((st.gamma + st.p.cwiseAbs() + st.q.cwiseAbs() + st.u).colwise().sum().transpose().array() -
          config_.lambda / rho) /
         nn;

#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      const double v = st.eta(i, k) + st.a(i, k);
      st.p(i, k) = 0.5 * sign(v) * pos(std::abs(v) + st.L[k] - st.u(i, k) - std::abs(st.q(i, k)) - st.gamma(i, k));
    }
  }
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      const double v = st.zeta(i, k) + st.b(i, k);
      st.q(i, k) = 0.5 * sign(v) * pos(std::abs(v) + st.L[k] - st.u(i, k) - std::abs(st.p(i, k)) - st.gamma(i, k));
      st.u(i, k) = pos(-st.gamma(i, k) - std::abs(st.p(i, k)) - std::abs(st.q(i, k)) + st.L[k]);
    }
  }

  const Vector w_new = st.yhat + st.z;
  const RowMatrix Pa = st.a * xt_;
  const RowMatrix Pb = st.b * xt_;

  double primal = 0.0;
#pragma omp parallel for schedule(static) reduction(max : primal)
  for (Index i = 0; i < n; ++i) {
    const double pa_ii = Pa(i, i);
    const double pb_ii = Pb(i, i);
    for (Index j = 0; j < n; ++j) {
      const double ad = pa_ii - Pa(i, j);
      const double bd = pb_ii - Pb(i, j);
      const double wij = w_new[i] - w_new[j];
      const double zij = st.z[i] - st.z[j];
      st.s(i, j) = pos(-st.alpha(i, j) - wij + ad);
      st.t(i, j) = pos(-st.beta(i, j) - zij + bd);
      const double r1 = st.s(i, j) + wij - ad;
      const double r2 = st.t(i, j) + zij - bd;
      st.alpha(i, j) += r1;
      st.beta(i, j) += r2;
      primal = std::max(primal, std::max(std::abs(r1), std::abs(r2)));
    }
    for (Index k = 0; k < d; ++k) {
      const double r3 = st.u(i, k) + std::abs(st.p(i, k)) + std::abs(st.q(i, k)) - st.L[k];
      const double r4 = st.a(i, k) - st.p(i, k);
      const double r5 = st.b(i, k) - st.q(i, k);
      st.gamma(i, k) += r3;
      st.eta(i, k) += r4;
      st.zeta(i, k) += r5;
      primal = std::max(primal, std::max({std::abs(r3), std::abs(r4), std::abs(r5)}));
    }
  }
  return primal;
}

}  // namespace pldc
