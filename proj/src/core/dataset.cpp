#include <algorithm>
#include <cmath>
#include <numeric>

#include "pldc/dataset.hpp"
#include "pldc/error.hpp"

namespace pldc {

namespace {

bool row_less(const RowMatrix& x, Index a, Index b) {
  for (Index c = 0; c < x.cols(); ++c) {
    if (x(a, c) != x(b, c)) return x(a, c) < x(b, c);
  }
  return false;
}

bool row_equal(const RowMatrix& x, Index a, Index b) { return x.row(a) == x.row(b); }

// Indices sorted lexicographically by row, ties by index.
std::vector<Index> sorted_rows(const RowMatrix& x) {
  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return row_less(x, a, b); });
  return order;
}

}  // namespace

std::vector<Index> group_identical_rows(const RowMatrix& x, Index* group_count) {
  const auto order = sorted_rows(x);
  std::vector<Index> leader(static_cast<std::size_t>(x.rows()));
  for (std::size_t k = 0; k < order.size(); ++k) {
    const bool same = k > 0 && row_equal(x, order[k], order[k - 1]);
    leader[static_cast<std::size_t>(order[k])] = same ? leader[static_cast<std::size_t>(order[k - 1])] : order[k];
  }
  // Renumber groups by first appearance in the original order.
  std::vector<Index> group(static_cast<std::size_t>(x.rows()));
  std::vector<Index> id_of_leader(static_cast<std::size_t>(x.rows()), -1);
  Index next = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    auto& id = id_of_leader[static_cast<std::size_t>(leader[static_cast<std::size_t>(i)])];
    if (id < 0) id = next++;
    group[static_cast<std::size_t>(i)] = id;
  }
  if (group_count) *group_count = next;
  return group;
}

Dataset::Dataset(RowMatrix x, Vector y, std::vector<std::string> feature_names) {
  if (x.rows() != y.size()) {
    throw DimensionError("dataset has " + std::to_string(x.rows()) + " rows but " + std::to_string(y.size()) +
                         " responses");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw DataError("dataset contains non-finite values");
  }
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != x.cols()) {
    throw DimensionError("feature name count does not match column count");
  }

  const auto order = sorted_rows(x);
  std::vector<bool> keep(static_cast<std::size_t>(x.rows()), true);
  for (std::size_t k = 1; k < order.size(); ++k) {
    const Index prev = order[k - 1];
    const Index cur = order[k];
    if (!row_equal(x, prev, cur)) continue;
    // Rows sharing x form a contiguous run; compare against the first kept one.
    std::size_t first = k - 1;
    while (first > 0 && row_equal(x, order[first - 1], cur)) --first;
    const Index anchor = order[first];
    if (y[anchor] != y[cur]) {
      throw DataError("rows " + std::to_string(std::min(anchor, cur)) + " and " +
                      std::to_string(std::max(anchor, cur)) + " have identical features but different responses");
    }
    keep[static_cast<std::size_t>(std::max(anchor, cur))] = false;
  }

  Index kept = 0;
  for (bool k : keep) kept += k ? 1 : 0;
  x_.resize(kept, x.cols());
  y_.resize(kept);
  Index r = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    if (keep[static_cast<std::size_t>(i)]) {
      x_.row(r) = x.row(i);
      y_[r] = y[i];
      ++r;
    } else {
      dropped_.push_back(i);
    }
  }
  feature_names_ = std::move(feature_names);
  if (feature_names_.empty()) {
    for (Index c = 0; c < x_.cols(); ++c) feature_names_.push_back("x" + std::to_string(c + 1));
  }
}

Dataset::Dataset(Validated, RowMatrix x, Vector y, std::vector<std::string> names,
                 std::optional<Standardizer> standardizer)
    : x_(std::move(x)), y_(std::move(y)), feature_names_(std::move(names)), standardizer_(std::move(standardizer)) {}

Dataset Dataset::standardized() const {
  if (standardizer_) return *this;
  Standardizer s;
  s.mean = n() > 0 ? Vector(x_.colwise().mean().transpose()) : Vector::Zero(d());
  s.scale = Vector::Ones(d());
  for (Index c = 0; c < d(); ++c) {
    if (n() == 0) break;
    const double var = (x_.col(c).array() - s.mean[c]).square().mean();
    const double sd = std::sqrt(var);
    if (sd > 0.0 && std::isfinite(sd)) s.scale[c] = sd;
  }
  RowMatrix xs = x_;
  for (Index i = 0; i < n(); ++i) {
    xs.row(i) = ((x_.row(i).transpose() - s.mean).cwiseQuotient(s.scale)).transpose();
  }
  return Dataset(Validated{}, std::move(xs), y_, feature_names_, std::move(s));
}

Dataset Dataset::with_y(Vector y) const {
  if (y.size() != n()) throw DimensionError("replacement responses have the wrong length");
  return Dataset(Validated{}, x_, std::move(y), feature_names_, standardizer_);
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  RowMatrix xs(static_cast<Index>(rows.size()), d());
  Vector ys(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= n()) throw DimensionError("subset index out of range");
    xs.row(static_cast<Index>(k)) = x_.row(rows[k]);
    ys[static_cast<Index>(k)] = y_[rows[k]];
  }
  return Dataset(Validated{}, std::move(xs), std::move(ys), feature_names_, standardizer_);
}

}  // namespace pldc
