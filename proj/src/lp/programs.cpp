#include <algorithm>
#include <cmath>

#include "pldc/error.hpp"
#include "pldc/lp.hpp"

namespace pldc {

namespace {

struct RowBuilder {
  std::vector<std::vector<std::pair<Index, double>>> rows;
  std::vector<double> rhs;

  void add(std::vector<std::pair<Index, double>> row, double h) {
    rows.push_back(std::move(row));
    rhs.push_back(h);
  }

  void emit(ConvexProgram& prog, Index nv) const {
    prog.ineq_matrix = RowMatrix::Zero(static_cast<Index>(rows.size()), nv);
    prog.ineq_rhs.resize(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const auto& [k, g] : rows[r]) prog.ineq_matrix(static_cast<Index>(r), k) += g;
      prog.ineq_rhs[static_cast<Index>(r)] = rhs[r];
    }
  }
};

}  // namespace

ConvexProgram build_srm_program(const Dataset& data, double lambda, Loss loss, LMode mode) {
  const Index n = data.n();
  const Index d = data.d();
  if (n < 2) throw DataError("the fit program needs at least 2 points");
  if (!(lambda > 0.0)) throw Error("the fit program needs lambda > 0 to be bounded");
  const auto& x = data.x();
  const auto& y = data.y();

  SrmLayout lay{n, d, mode, loss != Loss::squared};
  const Index nv = lay.num_vars();
  ConvexProgram prog;
  prog.linear = Vector::Zero(nv);
  for (Index k = 0; k < lay.num_budget(); ++k) prog.linear[lay.budget(k)] = lambda;

  RowBuilder rb;
  switch (loss) {
    case Loss::squared:
      prog.quadratic = Eigen::MatrixXd::Zero(nv, nv);
      for (Index i = 0; i < n; ++i) {
        prog.quadratic(lay.yhat(i), lay.yhat(i)) = 2.0;
        prog.linear[lay.yhat(i)] = -2.0 * y[i];
      }
      prog.constant = y.squaredNorm();
      break;
    case Loss::absolute:
      for (Index i = 0; i < n; ++i) {
        prog.linear[lay.slack(i)] = 1.0;
        rb.add({{lay.yhat(i), 1.0}, {lay.slack(i), -1.0}}, y[i]);
        rb.add({{lay.yhat(i), -1.0}, {lay.slack(i), -1.0}}, -y[i]);
      }
      break;
    case Loss::hinge:
      for (Index i = 0; i < n; ++i) {
        prog.linear[lay.slack(i)] = 1.0;
        rb.add({{lay.yhat(i), -y[i]}, {lay.slack(i), -1.0}}, -1.0);
        rb.add({{lay.slack(i), -1.0}}, 0.0);
      }
      break;
  }

  // yhat_i - yhat_j + z_i - z_j >= <a_j, x_i - x_j> and z_i - z_j >= <b_j, x_i - x_j>.
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<std::pair<Index, double>> r1{
          {lay.yhat(i), -1.0}, {lay.yhat(j), 1.0}, {lay.z(i), -1.0}, {lay.z(j), 1.0}};
      std::vector<std::pair<Index, double>> r2{{lay.z(i), -1.0}, {lay.z(j), 1.0}};
      for (Index k = 0; k < d; ++k) {
        const double dx = x(i, k) - x(j, k);
        if (dx == 0.0) continue;
        r1.emplace_back(lay.a_pos(j, k), dx);
        r1.emplace_back(lay.a_neg(j, k), -dx);
        r2.emplace_back(lay.b_pos(j, k), dx);
        r2.emplace_back(lay.b_neg(j, k), -dx);
      }
      rb.add(std::move(r1), 0.0);
      rb.add(std::move(r2), 0.0);
    }
  }

  for (Index i = 0; i < n; ++i) {
    if (mode == LMode::scalar) {
      std::vector<std::pair<Index, double>> row{{lay.budget(0), -1.0}};
      for (Index k = 0; k < d; ++k) {
        for (Index v : {lay.a_pos(i, k), lay.a_neg(i, k), lay.b_pos(i, k), lay.b_neg(i, k)}) row.emplace_back(v, 1.0);
      }
      rb.add(std::move(row), 0.0);
    } else {
      for (Index k = 0; k < d; ++k) {
        rb.add({{lay.a_pos(i, k), 1.0},
                {lay.a_neg(i, k), 1.0},
                {lay.b_pos(i, k), 1.0},
                {lay.b_neg(i, k), 1.0},
                {lay.budget(k), -1.0}},
               0.0);
      }
    }
    for (Index k = 0; k < d; ++k) {
      for (Index v : {lay.a_pos(i, k), lay.a_neg(i, k), lay.b_pos(i, k), lay.b_neg(i, k)}) rb.add({{v, -1.0}}, 0.0);
    }
  }
  rb.emit(prog, nv);

  // Shifting every z by the same amount changes nothing.
  Vector shift = Vector::Zero(nv);
  for (Index i = 0; i < n; ++i) shift[lay.z(i)] = 1.0;
  prog.invariant_directions.push_back(shift);

  for (Index i = 0; i < n; ++i) {
    std::vector<Index> blk;
    for (Index k = 0; k < d; ++k) {
      for (Index v : {lay.a_pos(i, k), lay.a_neg(i, k), lay.b_pos(i, k), lay.b_neg(i, k)}) blk.push_back(v);
    }
    prog.blocks.push_back(std::move(blk));
  }

  // Strictly feasible start: yhat = y, slopes C x_i with C above every
  // pairwise |dy| / |dx|^2, z_i = C |x_i|^2 / 2 - y_i / 2. Both families then
  // hold with margin (C - |dy|/|dx|^2) |dx|^2 / 2 > 0.
  double cmax = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double dx2 = (x.row(i) - x.row(j)).squaredNorm();
      if (dx2 == 0.0) throw DataError("the fit program needs distinct x rows");
      cmax = std::max(cmax, std::abs(y[i] - y[j]) / dx2);
    }
  }
  const double C = 2.0 * cmax + 1.0;
  Vector w0 = Vector::Zero(nv);
  const double delta = 1.0;
  for (Index i = 0; i < n; ++i) {
    w0[lay.yhat(i)] = y[i];
    w0[lay.z(i)] = 0.5 * C * x.row(i).squaredNorm() - 0.5 * y[i];
    for (Index k = 0; k < d; ++k) {
      const double s = C * x(i, k);
      w0[lay.a_pos(i, k)] = std::max(s, 0.0) + delta;
      w0[lay.a_neg(i, k)] = std::max(-s, 0.0) + delta;
      w0[lay.b_pos(i, k)] = std::max(s, 0.0) + delta;
      w0[lay.b_neg(i, k)] = std::max(-s, 0.0) + delta;
    }
    if (lay.slacks) w0[lay.slack(i)] = 1.0;
  }
  for (Index k = 0; k < lay.num_budget(); ++k) {
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Index kk = 0; kk < d; ++kk) {
        if (mode == LMode::per_coordinate && kk != k) continue;
        acc += w0[lay.a_pos(i, kk)] + w0[lay.a_neg(i, kk)] + w0[lay.b_pos(i, kk)] + w0[lay.b_neg(i, kk)];
      }
      worst = std::max(worst, acc);
    }
    w0[lay.budget(k)] = worst + 1.0;
  }
  prog.start = std::move(w0);
  return prog;
}

SrmSolution solve_srm(const Dataset& data, double lambda, Loss loss, LMode mode, double tol) {
  const ConvexProgram prog = build_srm_program(data, lambda, loss, mode);
  SrmSolution sol;
  sol.raw = solve(prog, tol);
  if (sol.raw.status != SolveStatus::optimal) {
    throw SolverError("fit program: solver returned " + to_string(sol.raw.status));
  }
  const Index n = data.n(), d = data.d();
  SrmLayout lay{n, d, mode, loss != Loss::squared};
  const Vector& w = sol.raw.w;
  Witness wit;
  wit.x = data.x();
  wit.yhat.resize(n);
  wit.z.resize(n);
  wit.a.resize(n, d);
  wit.b.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    wit.yhat[i] = w[lay.yhat(i)];
    wit.z[i] = w[lay.z(i)];
    for (Index k = 0; k < d; ++k) {
      wit.a(i, k) = w[lay.a_pos(i, k)] - w[lay.a_neg(i, k)];
      wit.b(i, k) = w[lay.b_pos(i, k)] - w[lay.b_neg(i, k)];
    }
  }
  sol.L.resize(lay.num_budget());
  for (Index k = 0; k < lay.num_budget(); ++k) sol.L[k] = w[lay.budget(k)];
  sol.witness = std::move(wit);
  sol.objective = sol.raw.objective;
  return sol;
}

double interpolation_violation(const RowMatrix& x, const Witness& w) {
  double worst = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.rows(); ++j) {
      if (i == j) continue;
      const Eigen::RowVectorXd dx = x.row(i) - x.row(j);
      worst = std::max(worst, w.a.row(j).dot(dx) - (w.yhat[i] - w.yhat[j] + w.z[i] - w.z[j]));
      worst = std::max(worst, w.b.row(j).dot(dx) - (w.z[i] - w.z[j]));
    }
  }
  return worst;
}

}  // namespace pldc
