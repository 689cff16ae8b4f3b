#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "pldc/core.hpp"
#include "pldc/error.hpp"

namespace pldc {

MaxAffine::MaxAffine(RowMatrix slopes, Vector offsets) : slopes_(std::move(slopes)), offsets_(std::move(offsets)) {
  if (slopes_.rows() == 0) {
    throw DimensionError("max-affine function needs at least one plane");
  }
  if (slopes_.rows() != offsets_.size()) {
    throw DimensionError("max-affine: " + std::to_string(slopes_.rows()) + " slopes but " +
                         std::to_string(offsets_.size()) + " offsets");
  }
}

MaxAffine MaxAffine::constant(Index dim, double c) {
  return MaxAffine(RowMatrix::Zero(1, dim), Vector::Constant(1, c));
}

double MaxAffine::value(const VectorRef& x) const {
  if (x.size() != dim()) {
    throw DimensionError("max-affine: input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(dim()));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < size(); ++k) {
    best = std::max(best, slopes_.row(k).dot(x) + offsets_[k]);
  }
  return best;
}

double MaxAffine::max_slope_l1() const {
  double best = 0.0;
  for (Index k = 0; k < size(); ++k) {
    best = std::max(best, slopes_.row(k).lpNorm<1>());
  }
  return best;
}

MaxAffine minkowski_sum(const MaxAffine& lhs, const MaxAffine& rhs, std::size_t plane_cap) {
  if (lhs.dim() != rhs.dim()) {
    throw DimensionError("plane sum of functions with different input dimensions");
  }
  const auto k1 = static_cast<std::size_t>(lhs.size());
  const auto k2 = static_cast<std::size_t>(rhs.size());
  if (k1 * k2 > plane_cap) {
    throw CapacityError("plane sum needs " + std::to_string(k1 * k2) + " planes, cap is " +
                        std::to_string(plane_cap));
  }
  RowMatrix slopes(static_cast<Index>(k1 * k2), lhs.dim());
  Vector offsets(static_cast<Index>(k1 * k2));
  Index row = 0;
  for (Index i = 0; i < lhs.size(); ++i) {
    for (Index j = 0; j < rhs.size(); ++j, ++row) {
      slopes.row(row) = lhs.slopes().row(i) + rhs.slopes().row(j);
      offsets[row] = lhs.offsets()[i] + rhs.offsets()[j];
    }
  }
  return MaxAffine(std::move(slopes), std::move(offsets));
}

MaxAffine plane_union(const MaxAffine& lhs, const MaxAffine& rhs) {
  if (lhs.dim() != rhs.dim()) {
    throw DimensionError("plane union of functions with different input dimensions");
  }
  RowMatrix slopes(lhs.size() + rhs.size(), lhs.dim());
  slopes << lhs.slopes(), rhs.slopes();
  Vector offsets(lhs.size() + rhs.size());
  offsets << lhs.offsets(), rhs.offsets();
  return MaxAffine(std::move(slopes), std::move(offsets));
}

MaxAffine dedupe_planes(const MaxAffine& f) {
  const Index k = f.size();
  const Index d = f.dim();
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  auto key_less = [&](Index a, Index b) {
    for (Index c = 0; c < d; ++c) {
      if (f.slopes()(a, c) != f.slopes()(b, c)) return f.slopes()(a, c) < f.slopes()(b, c);
    }
    return f.offsets()[a] < f.offsets()[b];
  };
  auto key_equal = [&](Index a, Index b) {
    return f.slopes().row(a) == f.slopes().row(b) && f.offsets()[a] == f.offsets()[b];
  };
  std::sort(order.begin(), order.end(), key_less);
  order.erase(std::unique(order.begin(), order.end(), key_equal), order.end());

  RowMatrix slopes(static_cast<Index>(order.size()), d);
  Vector offsets(static_cast<Index>(order.size()));
  for (std::size_t r = 0; r < order.size(); ++r) {
    slopes.row(static_cast<Index>(r)) = f.slopes().row(order[r]);
    offsets[static_cast<Index>(r)] = f.offsets()[order[r]];
  }
  return MaxAffine(std::move(slopes), std::move(offsets));
}

}  // namespace pldc
