#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pldc/core.hpp"
#include "pldc/dataset.hpp"
#include "pldc/lp.hpp"

namespace pldc {

struct DiscrepancyResult {
  double value = 0.0;
  double L = 0.0;
  /// Witness over the points actually used, in split order: rows of
  /// witness.x are x[order[0]], x[order[1]], ...
  Witness witness;
  std::vector<Index> order;
  /// Original row dropped to make n even, if any.
  std::optional<Index> dropped;
  SolveStatus status = SolveStatus::optimal;
};

/// Empirical maximum discrepancy of DC functions with seminorm at most L:
///   max (2/n) (sum_{first half} yhat_i - sum_{second half} yhat_i)
/// over values yhat a DC_L function can take at the points. `split` is a
/// permutation of the rows; the first half of it is the "+" half. Odd n drops
/// the last row of the permuted order. Identical rows share one value.
DiscrepancyResult discrepancy(const RowMatrix& x, double L, const std::optional<std::vector<Index>>& split = {},
                              double tol = 1e-10);

/// Seeded uniform permutation of 0..n-1.
std::vector<Index> random_split(Index n, std::uint64_t seed);

/// {2^-j * m_scale * dhat : j = -8, ..., 1}, largest first.
std::vector<double> lambda_grid_from(double dhat, double m_scale = 1.0);

/// lambda_grid_from(discrepancy(data.x(), 1).value, m_scale).
std::vector<double> lambda_grid(const Dataset& data, double m_scale = 1.0);

/// 24 M dhat.
double theoretical_lambda(double dhat, double M);

}  // namespace pldc
