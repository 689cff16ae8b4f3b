#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace pldc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorRef = Eigen::Ref<const Vector>;

/// Convex piecewise-linear function x -> max_k <slope_k, x> + offset_k.
///
/// Plane k is row k of `slopes()` together with `offsets()[k]`. There is always
/// at least one plane. Ties between planes need no resolution since the value
/// does not depend on which maximiser is picked.
class MaxAffine {
 public:
  MaxAffine(RowMatrix slopes, Vector offsets);

  /// A single flat plane at height `c`.
  static MaxAffine constant(Index dim, double c);

  Index dim() const { return slopes_.cols(); }
  Index size() const { return slopes_.rows(); }
  const RowMatrix& slopes() const { return slopes_; }
  const Vector& offsets() const { return offsets_; }

  double value(const VectorRef& x) const;

  /// Largest l1 norm over the plane slopes.
  double max_slope_l1() const;

 private:
  RowMatrix slopes_;
  Vector offsets_;
};

/// Per-feature affine map x' = (x - mean) / scale applied before evaluation.
struct Standardizer {
  Vector mean;
  Vector scale;

  Index dim() const { return mean.size(); }
  Vector apply(const VectorRef& x) const;
  bool operator==(const Standardizer& other) const;
};

/// Decision variables (yhat, z, a, b) certifying a DC interpolant at points x.
struct Witness {
  RowMatrix x;
  Vector yhat;
  Vector z;
  RowMatrix a;
  RowMatrix b;
};

/// Bookkeeping attached to a model by whichever procedure produced it.
struct FitRecord {
  std::string method;  // "admm", "interpolation", "relu", "witness", ...
  std::string loss;
  double lambda = 0.0;
  double rho = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  std::string variant;
  std::optional<Witness> witness;
};

/// Difference of two max-affine functions, optionally behind a standardizer.
///
/// Immutable once built; concurrent evaluation from several threads is safe.
class PLDCModel {
 public:
  PLDCModel(MaxAffine phi1, MaxAffine phi2, std::optional<Standardizer> standardizer = std::nullopt,
            FitRecord meta = {});

  const MaxAffine& phi1() const { return phi1_; }
  const MaxAffine& phi2() const { return phi2_; }
  const std::optional<Standardizer>& standardizer() const { return standardizer_; }
  const FitRecord& meta() const { return meta_; }

  /// Input length expected by `evaluate`.
  Index dim() const { return phi1_.dim(); }

  /// phi1(x') - phi2(x') where x' is the standardized input. Linear scan over
  /// every plane; throws DimensionError on a length mismatch.
  double evaluate(const VectorRef& x) const;

  /// Row-wise evaluate.
  Vector evaluate_rows(const RowMatrix& x) const;

  PLDCModel with_meta(FitRecord meta) const;

 private:
  MaxAffine phi1_;
  MaxAffine phi2_;
  std::optional<Standardizer> standardizer_;
  FitRecord meta_;
};

class Dataset;

/// Plane i of phi1 is (a_i, yhat_i + z_i - <a_i, x_i>) and plane i of phi2 is
/// (b_i, z_i - <b_i, x_i>). When the witness satisfies the pairwise DC
/// feasibility inequalities, evaluate(model, x_i) == yhat_i. Feasibility is
/// the caller's responsibility: an infeasible witness still yields a model.
PLDCModel build_from_witness(const RowMatrix& x, const Vector& yhat, const Vector& z,
                             const RowMatrix& a, const RowMatrix& b);

/// Exact interpolant of distinct-x data obtained by adding and subtracting the
/// quadratic (C/2)|x|^2 with C = max_{i != j} |y_i - y_j| / |x_i - x_j|^2.
/// C is 0 for a single point or constant y, giving the constant model.
PLDCModel interpolate_quadratic_shift(const Dataset& data);

/// The constant C used by interpolate_quadratic_shift.
double quadratic_shift_constant(const Dataset& data);

/// max_k |slope1_k|_1 + max_k |slope2_k|_1. An upper bound on the DC seminorm
/// of the represented function, not the seminorm itself.
double seminorm_bound(const PLDCModel& model);

/// Model of c * f. Non-negative c scales both parts; negative c swaps them.
PLDCModel scale(const PLDCModel& model, double c);

inline constexpr std::size_t kDefaultPlaneCap = std::size_t{1} << 20;

/// Model of f + g with each part the pairwise plane sums (K1*K2 planes).
/// Throws CapacityError if the product exceeds `plane_cap`.
PLDCModel add(const PLDCModel& f, const PLDCModel& g, std::size_t plane_cap = kDefaultPlaneCap);

/// Same function with the standardizer absorbed into the planes.
PLDCModel fold_standardizer(const PLDCModel& model);

/// Pairwise plane sums of two max-affine functions: max(A) + max(B).
MaxAffine minkowski_sum(const MaxAffine& lhs, const MaxAffine& rhs, std::size_t plane_cap = kDefaultPlaneCap);

/// Union of the plane lists: max(max(A), max(B)).
MaxAffine plane_union(const MaxAffine& lhs, const MaxAffine& rhs);

/// Drops exact duplicate planes; keeps first occurrence order-independent (sorted).
MaxAffine dedupe_planes(const MaxAffine& f);

}  // namespace pldc
