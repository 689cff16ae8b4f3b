#include <algorithm>
#include <cmath>
#include <vector>

#include "pldc/admm.hpp"
#include "pldc/error.hpp"

namespace pldc {

double prox_absolute(double v, double y, double tau) {
  const double r = v - y;
  if (r > tau) return v - tau;
  if (r < -tau) return v + tau;
  return y;
}

double prox_hinge(double v, double y, double tau) {
  const double m = y * v;
  if (m >= 1.0) return v;
  if (m <= 1.0 - tau) return v + tau * y;
  // Kink of the hinge: pinned at the margin.
  return y;
}

// Where the yhat/z block comes from.
//
// Collect the terms of the augmented Lagrangian that involve yhat and z. With
// r_ij = yhat_i - yhat_j + z_i - z_j and z's own pairwise differences, the
// quadratic part is
//   (rho/2) sum_ij (r_ij + k_ij)^2 + (rho/2) sum_ij (z_i - z_j + m_ij)^2
// where k, m gather alpha, s, <a_i, x_i - x_j> (resp. beta, t, b). Setting the
// z-gradient to zero and writing S = sum(yhat) gives, under the gauge
// sum(z) = 0,
//   z = (A' + B) / (4n) - (yhat - S/n) / 2
// with A', B the A_i, B_i sums of the sweep minus the y term. Substituting
// back leaves, for yhat alone,
//   sum_i loss_i(yhat_i) + (rho n / 2)|yhat|^2 - (rho / 2) S^2 - c^T yhat,
//   c = (rho / 2)(A' - B).
// For squared loss this is the printed closed form. For any other separable
// loss the optimality condition reads
//   yhat_i = prox_{loss_i / (rho n)}((c_i + rho S) / (rho n)),
// so the only coupling is through the scalar S, which must equal the sum of
// the right-hand sides. F(S) = sum_i prox(...) - S is piecewise linear and
// non-increasing (each prox has slope 0 or 1 in S/n), so the root is found by
// bracketing between the kinks and interpolating linearly.
Vector solve_coupled_prox(const Vector& c, const Vector& y, double rho, Loss loss) {
  const Index n = c.size();
  if (y.size() != n) throw DimensionError("coupled prox: c and y differ in length");
  if (loss == Loss::squared) throw Error("coupled prox: squared loss has a closed form");
  const double nn = static_cast<double>(n);
  const double tau = 1.0 / (rho * nn);

  auto prox = [&](Index i, double v) {
    return loss == Loss::absolute ? prox_absolute(v, y[i], tau) : prox_hinge(v, y[i], tau);
  };
  auto arg = [&](Index i, double S) { return (c[i] + rho * S) / (rho * nn); };
  auto F = [&](double S) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) acc += prox(i, arg(i, S));
    return acc - S;
  };

  // Kinks in v, mapped to S via v = c_i/(rho n) + S/n.
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(2 * n));
  for (Index i = 0; i < n; ++i) {
    double k1, k2;
    if (loss == Loss::absolute) {
      k1 = y[i] - tau;
      k2 = y[i] + tau;
    } else {
      k1 = y[i];
      k2 = y[i] * (1.0 - tau);
    }
    knots.push_back(nn * k1 - c[i] / rho);
    knots.push_back(nn * k2 - c[i] / rho);
  }
  std::sort(knots.begin(), knots.end());

  // F is constant beyond the outer kinks, so a root lies within [front, back].
  double S;
  if (F(knots.front()) <= 0.0) {
    S = knots.front();
  } else if (F(knots.back()) > 0.0) {
    S = knots.back();
  } else {
    std::size_t lo = 0, hi = knots.size() - 1;  // F(lo) > 0 >= F(hi)
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (F(knots[mid]) > 0.0 ? lo : hi) = mid;
    }
    const double f0 = F(knots[lo]);
    const double f1 = F(knots[hi]);
    S = knots[lo] + (knots[hi] - knots[lo]) * f0 / (f0 - f1);
  }

  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = prox(i, arg(i, S));
  return out;
}

}  // namespace pldc
