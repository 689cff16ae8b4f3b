// Serial sweep, one loop per printed update. Kept for testing the parallel
// kernels; slow for anything beyond a few dozen points.

#include <algorithm>
#include <cmath>

#include "pldc/admm.hpp"

namespace pldc {

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

double pos(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

double AdmmSolver::sweep_reference() {
  auto& st = state_;
  const auto& x = data_.x();
  const Index n = data_.n();
  const Index d = data_.d();
  const double rho = config_.rho;
  const double nn = static_cast<double>(n);

  // A_i, B_i (the constant y term is added in update_yhat_z)
  Vector A = Vector::Zero(n);
  Vector B = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double ip_a = 0.0, ip_b = 0.0;
      for (Index k = 0; k < d; ++k) {
        const double dx = x(i, k) - x(j, k);
        ip_a += (st.a(i, k) + st.a(j, k)) * dx;
        ip_b += (st.b(i, k) + st.b(j, k)) * dx;
      }
      A[i] += st.alpha(j, i) - st.alpha(i, j) + st.s(j, i) - st.s(i, j) + ip_a;
      B[i] += st.beta(j, i) - st.beta(i, j) + st.t(j, i) - st.t(i, j) + ip_b;
    }
  }

  update_yhat_z(A, B);

  // a_i, b_i
  for (Index i = 0; i < n; ++i) {
    Eigen::VectorXd va = (st.p.row(i) - st.eta.row(i)).transpose();
    Eigen::VectorXd vb = (st.q.row(i) - st.zeta.row(i)).transpose();
    for (Index j = 0; j < n; ++j) {
      const double ga = st.alpha(i, j) + st.s(i, j) + st.yhat[i] - st.yhat[j] + st.z[i] - st.z[j];
      const double gb = st.beta(i, j) + st.t(i, j) + st.z[i] - st.z[j];
      for (Index k = 0; k < d; ++k) {
        const double dx = x(i, k) - x(j, k);
        va[k] += ga * dx;
        vb[k] += gb * dx;
      }
    }
    st.a.row(i) = (st.Lambda[static_cast<std::size_t>(i)] * va).transpose();
    st.b.row(i) = (st.Lambda[static_cast<std::size_t>(i)] * vb).transpose();
  }

  // L_d, with lambda_d = lambda
  for (Index k = 0; k < d; ++k) {
    double acc = -config_.lambda / rho;
    for (Index i = 0; i < n; ++i) {
      acc += st.gamma(i, k) + std::abs(st.p(i, k)) + std::abs(st.q(i, k)) + st.u(i, k);
    }
    st.L[k] = acc / nn;
  }

  // p uses the previous q; q then sees the fresh p.
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      const double v = st.eta(i, k) + st.a(i, k);
      st.p(i, k) = 0.5 * sign(v) * pos(std::abs(v) + st.L[k] - st.u(i, k) - std::abs(st.q(i, k)) - st.gamma(i, k));
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      const double v = st.zeta(i, k) + st.b(i, k);
      st.q(i, k) = 0.5 * sign(v) * pos(std::abs(v) + st.L[k] - st.u(i, k) - std::abs(st.p(i, k)) - st.gamma(i, k));
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      st.u(i, k) = pos(-st.gamma(i, k) - std::abs(st.p(i, k)) - std::abs(st.q(i, k)) + st.L[k]);
    }
  }

  // s, t
  RowMatrix ad(n, n), bd(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double va = 0.0, vb = 0.0;
      for (Index k = 0; k < d; ++k) {
        const double dx = x(i, k) - x(j, k);
        va += st.a(i, k) * dx;
        vb += st.b(i, k) * dx;
      }
      ad(i, j) = va;
      bd(i, j) = vb;
      st.s(i, j) = pos(-st.alpha(i, j) - st.yhat[i] + st.yhat[j] - st.z[i] + st.z[j] + va);
      st.t(i, j) = pos(-st.beta(i, j) - st.z[i] + st.z[j] + vb);
    }
  }

  // Dual updates. Each increment is the constraint residual.
  double primal = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double r1 = st.s(i, j) + st.yhat[i] - st.yhat[j] + st.z[i] - st.z[j] - ad(i, j);
      const double r2 = st.t(i, j) + st.z[i] - st.z[j] - bd(i, j);
      st.alpha(i, j) += r1;
      st.beta(i, j) += r2;
      primal = std::max({primal, std::abs(r1), std::abs(r2)});
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      const double r3 = st.u(i, k) + std::abs(st.p(i, k)) + std::abs(st.q(i, k)) - st.L[k];
      const double r4 = st.a(i, k) - st.p(i, k);
      const double r5 = st.b(i, k) - st.q(i, k);
      st.gamma(i, k) += r3;
      st.eta(i, k) += r4;
      st.zeta(i, k) += r5;
      primal = std::max({primal, std::abs(r3), std::abs(r4), std::abs(r5)});
    }
  }
  return primal;
}

}  // namespace pldc
