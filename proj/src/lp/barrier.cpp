#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "pldc/error.hpp"
#include "pldc/lp.hpp"

namespace pldc {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

double ConvexProgram::evaluate(const Vector& w) const {
  double v = linear.dot(w) + constant;
  if (quadratic.size() > 0) v += 0.5 * w.dot(quadratic * w);
  return v;
}

void ConvexProgram::validate() const {
  const Index v = num_vars();
  if (v == 0) throw DimensionError("program has no variables");
  if (ineq_matrix.cols() != v && ineq_matrix.rows() > 0) {
    throw DimensionError("constraint matrix has " + std::to_string(ineq_matrix.cols()) + " columns, expected " +
                         std::to_string(v));
  }
  if (ineq_rhs.size() != ineq_matrix.rows()) throw DimensionError("constraint rhs length mismatch");
  if (quadratic.size() > 0) {
    if (quadratic.rows() != v || quadratic.cols() != v) throw DimensionError("quadratic term has the wrong shape");
    if (!quadratic.isApprox(quadratic.transpose(), 1e-12)) throw Error("quadratic term is not symmetric");
    if (sense == Sense::maximize && !quadratic.isZero(0.0)) {
      throw Error("maximisation is only supported for linear objectives");
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(quadratic);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() < -1e-10 * std::max(1.0, quadratic.norm())).any()) {
      throw Error("quadratic term is not positive semidefinite");
    }
  }
  if (start && start->size() != v) throw DimensionError("start point has the wrong length");
  for (const auto& dir : invariant_directions) {
    if (dir.size() != v) throw DimensionError("invariant direction has the wrong length");
  }
}

namespace {

using SparseRow = std::vector<std::pair<Index, double>>;

// Minimisation-form problem the barrier loop works on.
struct Problem {
  Eigen::MatrixXd Q;  // empty for linear
  Vector c;
  std::vector<SparseRow> rows;
  Vector h;
  Eigen::MatrixXd null_basis;  // orthonormal columns, v x k
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> border;
  bool use_blocks = false;

  Index nv() const { return c.size(); }
  Index m() const { return h.size(); }

  double f0(const Vector& w) const {
    double v = c.dot(w);
    if (Q.size() > 0) v += 0.5 * w.dot(Q * w);
    return v;
  }

  Vector slacks(const Vector& w) const {
    Vector s(m());
    for (Index r = 0; r < m(); ++r) {
      double acc = 0.0;
      for (const auto& [k, g] : rows[static_cast<std::size_t>(r)]) acc += g * w[k];
      s[r] = h[r] - acc;
    }
    return s;
  }

  Vector apply_rows(const Vector& dw) const {
    Vector out(m());
    for (Index r = 0; r < m(); ++r) {
      double acc = 0.0;
      for (const auto& [k, g] : rows[static_cast<std::size_t>(r)]) acc += g * dw[k];
      out[r] = acc;
    }
    return out;
  }
};

std::vector<SparseRow> sparse_rows(const RowMatrix& G) {
  std::vector<SparseRow> out(static_cast<std::size_t>(G.rows()));
  for (Index r = 0; r < G.rows(); ++r) {
    for (Index k = 0; k < G.cols(); ++k) {
      if (G(r, k) != 0.0) out[static_cast<std::size_t>(r)].emplace_back(k, G(r, k));
    }
  }
  return out;
}

// Fills border/use_blocks; falls back to dense solves if the hint does not
// hold for these rows.
void prepare_blocks(Problem& p) {
  p.use_blocks = false;
  if (p.blocks.empty()) return;
  std::vector<Index> owner(static_cast<std::size_t>(p.nv()), -1);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    for (Index k : p.blocks[b]) {
      if (k < 0 || k >= p.nv() || owner[static_cast<std::size_t>(k)] != -1) return;
      owner[static_cast<std::size_t>(k)] = static_cast<Index>(b);
    }
  }
  for (const auto& row : p.rows) {
    Index seen = -1;
    for (const auto& [k, g] : row) {
      const Index o = owner[static_cast<std::size_t>(k)];
      if (o < 0) continue;
      if (seen >= 0 && o != seen) return;
      seen = o;
    }
  }
  if (p.Q.size() > 0) {
    for (Index i = 0; i < p.nv(); ++i) {
      for (Index j = 0; j < p.nv(); ++j) {
        const Index oi = owner[static_cast<std::size_t>(i)], oj = owner[static_cast<std::size_t>(j)];
        if (p.Q(i, j) != 0.0 && oi >= 0 && oj >= 0 && oi != oj) return;
      }
    }
  }
  for (Index c = 0; c < p.null_basis.cols(); ++c) {
    for (Index k = 0; k < p.nv(); ++k) {
      if (owner[static_cast<std::size_t>(k)] >= 0 && p.null_basis(k, c) != 0.0) return;
    }
  }
  p.border.clear();
  for (Index k = 0; k < p.nv(); ++k) {
    if (owner[static_cast<std::size_t>(k)] < 0) p.border.push_back(k);
  }
  p.use_blocks = true;
}

// Gram-Schmidt keeps exact zeros in place, which the block check relies on.
Eigen::MatrixXd orthonormal_basis(const std::vector<Vector>& dirs, Index v) {
  std::vector<Vector> basis;
  for (const auto& d : dirs) {
    Vector u = d;
    for (const auto& e : basis) u -= e.dot(u) * e;
    const double norm = u.norm();
    if (norm > 1e-12 * std::max(1.0, d.norm())) basis.push_back(u / norm);
  }
  Eigen::MatrixXd out(v, static_cast<Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Index>(k)) = basis[k];
  return out;
}

// Solves H x = rhs, exploiting the block-arrow structure when available.
bool solve_newton_system(const Problem& p, const Eigen::MatrixXd& H, const Vector& rhs, Vector& x) {
  if (!p.use_blocks) {
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) return false;
    x = llt.solve(rhs);
    return x.allFinite();
  }
  const Index nb = static_cast<Index>(p.border.size());
  Eigen::MatrixXd S(nb, nb);
  Vector rb(nb);
  for (Index i = 0; i < nb; ++i) {
    rb[i] = rhs[p.border[static_cast<std::size_t>(i)]];
    for (Index j = 0; j < nb; ++j) S(i, j) = H(p.border[static_cast<std::size_t>(i)], p.border[static_cast<std::size_t>(j)]);
  }
  std::vector<Eigen::MatrixXd> Y(p.blocks.size());
  std::vector<Vector> yk(p.blocks.size());
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& idx = p.blocks[b];
    const Index nk = static_cast<Index>(idx.size());
    Eigen::MatrixXd Hkk(nk, nk), HkB(nk, nb);
    Vector rk(nk);
    for (Index i = 0; i < nk; ++i) {
      rk[i] = rhs[idx[static_cast<std::size_t>(i)]];
      for (Index j = 0; j < nk; ++j) Hkk(i, j) = H(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      for (Index j = 0; j < nb; ++j) HkB(i, j) = H(idx[static_cast<std::size_t>(i)], p.border[static_cast<std::size_t>(j)]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(Hkk);
    if (llt.info() != Eigen::Success) return false;
    Y[b] = llt.solve(HkB);
    yk[b] = llt.solve(rk);
    S.noalias() -= HkB.transpose() * Y[b];
    rb.noalias() -= HkB.transpose() * yk[b];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) return false;
  const Vector xb = llt.solve(rb);
  x.resize(p.nv());
  for (Index i = 0; i < nb; ++i) x[p.border[static_cast<std::size_t>(i)]] = xb[i];
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const Vector xk = yk[b] - Y[b] * xb;
    for (std::size_t i = 0; i < p.blocks[b].size(); ++i) x[p.blocks[b][i]] = xk[static_cast<Index>(i)];
  }
  return x.allFinite();
}

enum class CenterStatus { ok, unbounded, failed, stopped };

struct Iterate {
  Vector w;
  Vector s;  // h - G w, updated incrementally
  int newton_steps = 0;
};

// Minimises t f0(w) - sum log s(w) from a strictly feasible iterate.
// Gradient of t f0 - sum log s at the iterate, and the Newton direction
// (orthogonal to the invariant directions).
bool newton_direction(const Problem& p, const Iterate& it, double t, Vector& grad, Vector& dw) {
  const Index v = p.nv();
  const Vector inv_s = it.s.cwiseInverse();
  grad = t * p.c;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(v, v);
  if (p.Q.size() > 0) {
    grad.noalias() += t * (p.Q * it.w);
    H = t * p.Q;
  }
  for (Index r = 0; r < p.m(); ++r) {
    const auto& row = p.rows[static_cast<std::size_t>(r)];
    const double is = inv_s[r];
    const double is2 = is * is;
    for (const auto& [i, gi] : row) {
      grad[i] += is * gi;
      for (const auto& [j, gj] : row) H(i, j) += is2 * gi * gj;
    }
  }
  if (p.null_basis.cols() > 0) {
    grad -= p.null_basis * (p.null_basis.transpose() * grad);
    const double sigma = std::max(H.diagonal().mean(), std::numeric_limits<double>::min());
    H.noalias() += sigma * p.null_basis * p.null_basis.transpose();
  }

  bool ok = solve_newton_system(p, H, -grad, dw);
  double jitter = 1e-12 * std::max(H.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (int tries = 0; !ok && tries < 8; ++tries, jitter *= 100.0) {
    Eigen::MatrixXd Hj = H;
    Hj.diagonal().array() += jitter;
    ok = solve_newton_system(p, Hj, -grad, dw);
  }
  if (!ok) return false;
  if (p.null_basis.cols() > 0) dw -= p.null_basis * (p.null_basis.transpose() * dw);
  return true;
}

// Minimises t f0(w) - sum log s(w) from a strictly feasible iterate.
CenterStatus center(const Problem& p, Iterate& it, double t, const BarrierOptions& opt, double blowup,
                    const std::function<bool(const Iterate&)>& stop) {
  for (int k = 0; k < opt.max_newton; ++k) {
    Vector grad, dw;
    if (!newton_direction(p, it, t, grad, dw)) return CenterStatus::failed;

    const double dec2 = -grad.dot(dw);
    if (dec2 / 2.0 <= opt.newton_tol) return CenterStatus::ok;

    const Vector gd = p.apply_rows(dw);
    double step_max = std::numeric_limits<double>::infinity();
    for (Index r = 0; r < p.m(); ++r) {
      if (gd[r] > 0.0) step_max = std::min(step_max, it.s[r] / gd[r]);
    }
    double alpha = std::min(1.0, 0.99 * step_max);
    const double quad = p.Q.size() > 0 ? dw.dot(p.Q * dw) : 0.0;
    double lin = p.c.dot(dw);
    if (p.Q.size() > 0) lin += it.w.dot(p.Q * dw);
    lin *= t;
    // f(w + a dw) - f(w) = t(a lin' + a^2 quad / 2) - sum log1p(-a gd / s),
    // evaluated termwise so the comparison survives large t.
    auto change = [&](double a) {
      double acc = a * lin + 0.5 * a * a * t * quad;
      for (Index r = 0; r < p.m(); ++r) acc -= std::log1p(-a * gd[r] / it.s[r]);
      return acc;
    };
    while (alpha > 1e-14 && !(change(alpha) <= 0.25 * alpha * grad.dot(dw))) alpha *= 0.5;
    if (alpha <= 1e-14) return CenterStatus::ok;  // stalled at rounding level

    it.w.noalias() += alpha * dw;
    it.s.noalias() -= alpha * gd;
    ++it.newton_steps;
    if (!it.w.allFinite()) return CenterStatus::failed;
    if (it.w.cwiseAbs().maxCoeff() > blowup) return CenterStatus::unbounded;
    if (stop && stop(it)) return CenterStatus::stopped;
  }
  return CenterStatus::ok;
}

struct BarrierOutcome {
  SolveStatus status = SolveStatus::numerical_failure;
  Iterate it;
  double t = 0.0;
  int outer = 0;
  bool stopped = false;
};

BarrierOutcome barrier(const Problem& p, Vector w0, double tol, double scale_hint, const BarrierOptions& opt,
                       const std::function<bool(const Iterate&)>& stop = {}) {
  BarrierOutcome out;
  out.it.w = std::move(w0);
  out.it.s = p.slacks(out.it.w);
  const double m = static_cast<double>(std::max<Index>(p.m(), 1));
  const double scale = scale_hint > 0.0 ? scale_hint : std::max(1.0, std::abs(p.f0(out.it.w)));
  const double target = tol * (scale_hint > 0.0 ? scale_hint : 1.0);
  const double blowup = 1e12 * std::max(1.0, out.it.w.cwiseAbs().maxCoeff());
  double t = m / scale;
  for (int k = 0; k < opt.max_outer; ++k) {
    const CenterStatus cs = center(p, out.it, t, opt, blowup, stop);
    out.t = t;
    out.outer = k + 1;
    if (cs == CenterStatus::failed) {
      out.status = SolveStatus::numerical_failure;
      return out;
    }
    if (cs == CenterStatus::unbounded) {
      out.status = SolveStatus::unbounded;
      return out;
    }
    if (cs == CenterStatus::stopped) {
      out.status = SolveStatus::optimal;
      out.stopped = true;
      return out;
    }
    if (p.m() == 0 || m / t <= target) {
      out.status = SolveStatus::optimal;
      return out;
    }
    t *= opt.mu;
  }
  out.status = SolveStatus::numerical_failure;
  return out;
}

}  // namespace

SolveResult solve(const ConvexProgram& prog, double tol, const BarrierOptions& options) {
  prog.validate();
  if (!(tol > 0.0)) throw Error("solver tolerance must be positive");
  const Index v = prog.num_vars();
  const double sgn = prog.sense == Sense::maximize ? -1.0 : 1.0;

  Problem p;
  if (prog.quadratic.size() > 0 && !prog.quadratic.isZero(0.0)) p.Q = prog.quadratic;
  p.c = sgn * prog.linear;
  p.rows = sparse_rows(prog.ineq_matrix);
  p.h = prog.ineq_rhs;
  p.null_basis = orthonormal_basis(prog.invariant_directions, v);
  p.blocks = prog.blocks;
  prepare_blocks(p);

  SolveResult res;
  Vector w0 = prog.start ? *prog.start : Vector::Zero(v);
  const bool start_ok = p.m() == 0 || p.slacks(w0).minCoeff() > 0.0;

  if (!start_ok) {
    // Phase I: min s subject to G w - s <= h, s >= -1, and a wide box on w.
    Problem q;
    const double R = 1e6 * std::max(1.0, w0.cwiseAbs().maxCoeff());
    q.c = Vector::Zero(v + 1);
    q.c[v] = 1.0;
    q.rows = p.rows;
    for (auto& row : q.rows) row.emplace_back(v, -1.0);
    q.h = p.h;
    const Index m0 = p.m();
    q.rows.push_back({{v, -1.0}});
    std::vector<double> extra{1.0};
    for (Index k = 0; k < v; ++k) {
      q.rows.push_back({{k, 1.0}});
      extra.push_back(R);
      q.rows.push_back({{k, -1.0}});
      extra.push_back(R);
    }
    q.h.conservativeResize(m0 + static_cast<Index>(extra.size()));
    for (std::size_t k = 0; k < extra.size(); ++k) q.h[m0 + static_cast<Index>(k)] = extra[k];
    q.null_basis = Eigen::MatrixXd(v + 1, 0);
    q.blocks = p.blocks;
    prepare_blocks(q);

    Vector start(v + 1);
    start.head(v) = w0.cwiseMax(-0.5 * R).cwiseMin(0.5 * R);
    const Vector s0 = p.slacks(start.head(v));
    start[v] = std::max(-s0.minCoeff(), 0.0) + 1.0;
    auto stop = [m0](const Iterate& it) { return it.s.head(m0).minCoeff() > 0.0 && it.w[it.w.size() - 1] < 0.0; };
    BarrierOutcome ph1 = barrier(q, start, 1e-9, 0.0, options, stop);
    res.newton_steps += ph1.it.newton_steps;
    if (!ph1.stopped) {
      res.status = ph1.status == SolveStatus::optimal ? SolveStatus::infeasible : ph1.status;
      res.w = ph1.it.w.head(v);
      res.objective = prog.evaluate(res.w);
      return res;
    }
    w0 = ph1.it.w.head(v);
    if (p.slacks(w0).minCoeff() <= 0.0) {
      res.status = SolveStatus::numerical_failure;
      res.w = w0;
      return res;
    }
  }

  // A caller-supplied scale makes the schedule invariant under rescaling.
  BarrierOutcome out = barrier(p, w0, tol, prog.objective_scale, options);
  res.newton_steps += out.it.newton_steps;
  res.outer_steps = out.outer;
  res.status = out.status;
  res.w = out.it.w;
  res.objective = prog.evaluate(res.w);
  const double t = out.t > 0.0 ? out.t : 1.0;
  res.gap = static_cast<double>(p.m()) / t;

  const Vector fresh = p.slacks(res.w);
  res.max_violation = p.m() > 0 ? std::max(0.0, -fresh.minCoeff()) : 0.0;
  // Multipliers from the linearised centering condition,
  // lambda_r = (1 + g_r^T dw / s_r) / (t s_r), so stationarity holds up to the
  // Newton step even when the last centering stopped early.
  res.duals = (t * out.it.s).cwiseInverse();
  {
    Vector grad, dw;
    if (p.m() > 0 && newton_direction(p, out.it, t, grad, dw)) {
      const Vector gd = p.apply_rows(dw);
      const Vector corrected = res.duals.array() * (1.0 + gd.array() / out.it.s.array());
      if (corrected.allFinite()) res.duals = corrected;
    }
  }
  Vector stat = p.c;
  if (p.Q.size() > 0) stat += p.Q * res.w;
  for (Index r = 0; r < p.m(); ++r) {
    for (const auto& [k, g] : p.rows[static_cast<std::size_t>(r)]) stat[k] += res.duals[r] * g;
  }
  double comp = 0.0;
  for (Index r = 0; r < p.m(); ++r) comp = std::max(comp, std::abs(res.duals[r]) * std::max(fresh[r], 0.0));
  const double neg = p.m() > 0 ? std::max(0.0, -res.duals.minCoeff()) : 0.0;
  res.kkt_residual = std::max({p.m() > 0 ? stat.cwiseAbs().maxCoeff() : 0.0, comp, neg});
  return res;
}

void dump_program(const ConvexProgram& prog, std::ostream& out) {
  const Index v = prog.num_vars();
  out.precision(17);
  out << "pldc-program " << v << ' ' << prog.num_constraints() << ' '
      << (prog.sense == Sense::minimize ? "minimize" : "maximize") << '\n';
  if (prog.quadratic.size() == 0) {
    out << "Q 0\n";
  } else {
    out << "Q " << v << '\n';
    for (Index i = 0; i < v; ++i) {
      for (Index j = 0; j < v; ++j) out << (j ? " " : "") << prog.quadratic(i, j);
      out << '\n';
    }
  }
  out << "c";
  for (Index k = 0; k < v; ++k) out << ' ' << prog.linear[k];
  out << "\nconstant " << prog.constant << '\n';
  for (Index r = 0; r < prog.num_constraints(); ++r) {
    for (Index k = 0; k < v; ++k) out << (k ? " " : "") << prog.ineq_matrix(r, k);
    out << " <= " << prog.ineq_rhs[r] << '\n';
  }
}

}  // namespace pldc
