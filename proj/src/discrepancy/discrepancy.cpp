#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pldc/discrepancy.hpp"
#include "pldc/error.hpp"

namespace pldc {

namespace {

// LP over distinct points u_g with objective weights c_g.
ConvexProgram build_program(const RowMatrix& u, const Vector& weight, double L) {
  const Index G = u.rows();
  const Index d = u.cols();
  auto yhat = [](Index g) { return g; };
  auto z = [G](Index g) { return G + g; };
  auto ap = [G, d](Index g, Index k) { return 2 * G + g * d + k; };
  auto am = [G, d](Index g, Index k) { return 2 * G + G * d + g * d + k; };
  auto bp = [G, d](Index g, Index k) { return 2 * G + 2 * G * d + g * d + k; };
  auto bm = [G, d](Index g, Index k) { return 2 * G + 3 * G * d + g * d + k; };
  const Index nv = 2 * G + 4 * G * d;
  const Index rows = 2 * G * (G - 1) + G + 4 * G * d;

  ConvexProgram prog;
  prog.sense = Sense::maximize;
  prog.linear = Vector::Zero(nv);
  for (Index g = 0; g < G; ++g) prog.linear[yhat(g)] = weight[g];
  prog.ineq_matrix = RowMatrix::Zero(rows, nv);
  prog.ineq_rhs = Vector::Zero(rows);

  Index r = 0;
  for (Index i = 0; i < G; ++i) {
    for (Index j = 0; j < G; ++j) {
      if (i == j) continue;
      // yhat_i - yhat_j + z_i - z_j >= <a_j, u_i - u_j>
      prog.ineq_matrix(r, yhat(i)) = -1.0;
      prog.ineq_matrix(r, yhat(j)) = 1.0;
      prog.ineq_matrix(r, z(i)) = -1.0;
      prog.ineq_matrix(r, z(j)) = 1.0;
      for (Index k = 0; k < d; ++k) {
        const double dx = u(i, k) - u(j, k);
        prog.ineq_matrix(r, ap(j, k)) = dx;
        prog.ineq_matrix(r, am(j, k)) = -dx;
      }
      ++r;
      // z_i - z_j >= <b_j, u_i - u_j>
      prog.ineq_matrix(r, z(i)) = -1.0;
      prog.ineq_matrix(r, z(j)) = 1.0;
      for (Index k = 0; k < d; ++k) {
        const double dx = u(i, k) - u(j, k);
        prog.ineq_matrix(r, bp(j, k)) = dx;
        prog.ineq_matrix(r, bm(j, k)) = -dx;
      }
      ++r;
    }
  }
  for (Index g = 0; g < G; ++g) {
    for (Index k = 0; k < d; ++k) {
      prog.ineq_matrix(r, ap(g, k)) = 1.0;
      prog.ineq_matrix(r, am(g, k)) = 1.0;
      prog.ineq_matrix(r, bp(g, k)) = 1.0;
      prog.ineq_matrix(r, bm(g, k)) = 1.0;
    }
    prog.ineq_rhs[r] = L;
    ++r;
  }
  for (Index g = 0; g < G; ++g) {
    for (Index k = 0; k < d; ++k) {
      for (Index v : {ap(g, k), am(g, k), bp(g, k), bm(g, k)}) {
        prog.ineq_matrix(r, v) = -1.0;
        ++r;
      }
    }
  }

  Vector zshift = Vector::Zero(nv), yshift = Vector::Zero(nv);
  for (Index g = 0; g < G; ++g) {
    zshift[z(g)] = 1.0;
    yshift[yhat(g)] = 1.0;
  }
  prog.invariant_directions = {zshift, yshift};
  for (Index g = 0; g < G; ++g) {
    std::vector<Index> blk;
    for (Index k = 0; k < d; ++k) {
      for (Index v : {ap(g, k), am(g, k), bp(g, k), bm(g, k)}) blk.push_back(v);
    }
    prog.blocks.push_back(std::move(blk));
  }

  // Start: yhat = 0, slopes C (u_g - mean), z = C |u_g - mean|^2 / 2. Each
  // pairwise row then has slack C |u_i - u_j|^2 / 2, and the budget uses at
  // most 3L/4. Centering keeps the start (and hence the whole barrier path)
  // unchanged under translation of the points; everything scales with L.
  const Eigen::RowVectorXd centre = u.colwise().mean();
  RowMatrix uc = u.rowwise() - centre;
  double max_l1 = 0.0;
  for (Index g = 0; g < G; ++g) max_l1 = std::max(max_l1, uc.row(g).lpNorm<1>());
  const double C = L / (4.0 * max_l1);
  const double delta = L / (16.0 * static_cast<double>(d));
  Vector w0 = Vector::Zero(nv);
  for (Index g = 0; g < G; ++g) {
    w0[z(g)] = 0.5 * C * uc.row(g).squaredNorm();
    for (Index k = 0; k < d; ++k) {
      const double s = C * uc(g, k);
      w0[ap(g, k)] = std::max(s, 0.0) + delta;
      w0[am(g, k)] = std::max(-s, 0.0) + delta;
      w0[bp(g, k)] = std::max(s, 0.0) + delta;
      w0[bm(g, k)] = std::max(-s, 0.0) + delta;
    }
  }
  prog.start = std::move(w0);
  prog.objective_scale = L;
  return prog;
}

}  // namespace

DiscrepancyResult discrepancy(const RowMatrix& x, double L, const std::optional<std::vector<Index>>& split,
                              double tol) {
  const Index n_all = x.rows();
  const Index d = x.cols();
  if (n_all < 2) throw DataError("discrepancy needs at least 2 points, got " + std::to_string(n_all));
  if (!(L >= 0.0) || !std::isfinite(L)) throw Error("discrepancy needs a finite L >= 0");
  if (!x.allFinite()) throw DataError("discrepancy: x contains non-finite values");

  DiscrepancyResult res;
  res.L = L;
  std::vector<Index> order(static_cast<std::size_t>(n_all));
  if (split) {
    order = *split;
    std::vector<Index> check = order;
    std::sort(check.begin(), check.end());
    bool perm = static_cast<Index>(check.size()) == n_all;
    for (Index i = 0; perm && i < n_all; ++i) perm = check[static_cast<std::size_t>(i)] == i;
    if (!perm) throw DimensionError("split is not a permutation of the rows");
  } else {
    std::iota(order.begin(), order.end(), Index{0});
  }
  if (n_all % 2 == 1) {
    res.dropped = order.back();
    order.pop_back();
  }
  const Index n = static_cast<Index>(order.size());
  res.order = order;

  RowMatrix xs(n, d);
  for (Index i = 0; i < n; ++i) xs.row(i) = x.row(order[static_cast<std::size_t>(i)]);

  Index G = 0;
  const auto group = group_identical_rows(xs, &G);
  RowMatrix u(G, d);
  Vector weight = Vector::Zero(G);
  for (Index i = 0; i < n; ++i) {
    const Index g = group[static_cast<std::size_t>(i)];
    u.row(g) = xs.row(i);
    weight[g] += (i < n / 2 ? 2.0 : -2.0) / static_cast<double>(n);
  }

  Witness& w = res.witness;
  w.x = xs;
  w.yhat = Vector::Zero(n);
  w.z = Vector::Zero(n);
  w.a = RowMatrix::Zero(n, d);
  w.b = RowMatrix::Zero(n, d);
  if (G < 2 || L == 0.0) {
    res.value = 0.0;
    return res;
  }

  const ConvexProgram prog = build_program(u, weight, L);
  const SolveResult sol = solve(prog, tol);
  res.status = sol.status;
  if (sol.status != SolveStatus::optimal) {
    throw SolverError("discrepancy program: solver returned " + to_string(sol.status));
  }
  for (Index i = 0; i < n; ++i) {
    const Index g = group[static_cast<std::size_t>(i)];
    w.yhat[i] = sol.w[g];
    w.z[i] = sol.w[G + g];
    for (Index k = 0; k < d; ++k) {
      w.a(i, k) = sol.w[2 * G + g * d + k] - sol.w[2 * G + G * d + g * d + k];
      w.b(i, k) = sol.w[2 * G + 2 * G * d + g * d + k] - sol.w[2 * G + 3 * G * d + g * d + k];
    }
  }
  // The zero function is feasible, so anything below zero is solver noise.
  res.value = std::max(sol.objective, 0.0);
  return res;
}

std::vector<Index> random_split(Index n, std::uint64_t seed) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  // Fisher-Yates by hand: std::shuffle's draw sequence is implementation-defined.
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  return order;
}

std::vector<double> lambda_grid_from(double dhat, double m_scale) {
  std::vector<double> grid;
  for (int j = -8; j <= 1; ++j) grid.push_back(std::ldexp(1.0, -j) * m_scale * dhat);
  return grid;
}

std::vector<double> lambda_grid(const Dataset& data, double m_scale) {
  return lambda_grid_from(discrepancy(data.x(), 1.0).value, m_scale);
}

double theoretical_lambda(double dhat, double M) { return 24.0 * M * dhat; }

}  // namespace pldc
