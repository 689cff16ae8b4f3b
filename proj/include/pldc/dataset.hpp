#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pldc/core.hpp"

namespace pldc {

/// Predictor matrix and response vector.
///
/// Construction enforces that no two rows share x with differing y (throws
/// DataError naming both rows) and drops exact (x, y) duplicates, keeping the
/// first copy. If `standardizer()` is set, `x()` is already expressed in
/// standardized coordinates and models fitted on it carry the same transform.
class Dataset {
 public:
  Dataset(RowMatrix x, Vector y, std::vector<std::string> feature_names = {});

  Index n() const { return x_.rows(); }
  Index d() const { return x_.cols(); }
  const RowMatrix& x() const { return x_; }
  const Vector& y() const { return y_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::optional<Standardizer>& standardizer() const { return standardizer_; }

  /// Original row indices that were removed as exact duplicates.
  const std::vector<Index>& dropped_duplicates() const { return dropped_; }

  /// Zero-mean, unit-variance copy with the transform recorded. Constant
  /// features keep scale 1 so every scale stays strictly positive.
  Dataset standardized() const;

  /// Same coordinates, new responses (labels recoded for one-vs-rest, ...).
  Dataset with_y(Vector y) const;

  /// Rows selected by index, in the given order; keeps the standardizer.
  Dataset subset(std::span<const Index> rows) const;

 private:
  struct Validated {};
  Dataset(Validated, RowMatrix x, Vector y, std::vector<std::string> names,
          std::optional<Standardizer> standardizer);

  RowMatrix x_;
  Vector y_;
  std::vector<std::string> feature_names_;
  std::optional<Standardizer> standardizer_;
  std::vector<Index> dropped_;
};

/// Groups rows of x that are exactly equal. Returns, for each row, the index
/// of its group; groups are numbered in order of first appearance.
std::vector<Index> group_identical_rows(const RowMatrix& x, Index* group_count = nullptr);

}  // namespace pldc
