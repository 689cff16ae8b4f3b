#include <algorithm>
#include <cmath>

#include "pldc/core.hpp"
#include "pldc/dataset.hpp"
#include "pldc/error.hpp"

namespace pldc {

Vector Standardizer::apply(const VectorRef& x) const {
  if (x.size() != mean.size()) {
    throw DimensionError("standardizer: input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(mean.size()));
  }
  return (x - mean).cwiseQuotient(scale);
}

bool Standardizer::operator==(const Standardizer& other) const {
  return mean.size() == other.mean.size() && mean == other.mean && scale == other.scale;
}

PLDCModel::PLDCModel(MaxAffine phi1, MaxAffine phi2, std::optional<Standardizer> standardizer, FitRecord meta)
    : phi1_(std::move(phi1)), phi2_(std::move(phi2)), standardizer_(std::move(standardizer)), meta_(std::move(meta)) {
  if (phi1_.dim() != phi2_.dim()) {
    throw DimensionError("model parts have dimensions " + std::to_string(phi1_.dim()) + " and " +
                         std::to_string(phi2_.dim()));
  }
  if (standardizer_) {
    if (standardizer_->mean.size() != phi1_.dim() || standardizer_->scale.size() != phi1_.dim()) {
      throw DimensionError("standardizer length does not match model dimension");
    }
    if ((standardizer_->scale.array() <= 0.0).any()) {
      throw DimensionError("standardizer scales must be strictly positive");
    }
  }
}

double PLDCModel::evaluate(const VectorRef& x) const {
  if (x.size() != dim()) {
    throw DimensionError("model expects " + std::to_string(dim()) + " features, got " + std::to_string(x.size()));
  }
  if (standardizer_) {
    const Vector xs = standardizer_->apply(x);
    return phi1_.value(xs) - phi2_.value(xs);
  }
  return phi1_.value(x) - phi2_.value(x);
}

Vector PLDCModel::evaluate_rows(const RowMatrix& x) const {
  Vector out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    out[i] = evaluate(x.row(i).transpose());
  }
  return out;
}

PLDCModel PLDCModel::with_meta(FitRecord meta) const {
  return PLDCModel(phi1_, phi2_, standardizer_, std::move(meta));
}

PLDCModel build_from_witness(const RowMatrix& x, const Vector& yhat, const Vector& z, const RowMatrix& a,
                             const RowMatrix& b) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (n == 0) throw DimensionError("witness needs at least one point");
  if (yhat.size() != n || z.size() != n || a.rows() != n || b.rows() != n || a.cols() != d || b.cols() != d) {
    throw DimensionError("witness shapes are inconsistent with x (" + std::to_string(n) + "x" +
                         std::to_string(d) + ")");
  }
  const Vector ax = (a.cwiseProduct(x)).rowwise().sum();
  const Vector bx = (b.cwiseProduct(x)).rowwise().sum();
  MaxAffine phi1(a, yhat + z - ax);
  MaxAffine phi2(b, z - bx);
  FitRecord meta;
  meta.method = "witness";
  meta.witness = Witness{x, yhat, z, a, b};
  return PLDCModel(std::move(phi1), std::move(phi2), std::nullopt, std::move(meta));
}

double quadratic_shift_constant(const Dataset& data) {
  double c = 0.0;
  const auto& x = data.x();
  const auto& y = data.y();
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = i + 1; j < data.n(); ++j) {
      const double dy = std::abs(y[i] - y[j]);
      if (dy == 0.0) continue;
      c = std::max(c, dy / (x.row(i) - x.row(j)).squaredNorm());
    }
  }
  return c;
}

PLDCModel interpolate_quadratic_shift(const Dataset& data) {
  if (data.n() == 0) throw DataError("interpolation needs at least one point");
  const double c = quadratic_shift_constant(data);
  const auto& x = data.x();
  // <C x_i, x - x_i> + C/2 |x_i|^2 +- y_i/2 folds to slope C x_i and offset
  // -C/2 |x_i|^2 +- y_i/2.
  const RowMatrix slopes = c * x;
  const Vector half_sq = 0.5 * c * x.rowwise().squaredNorm();
  MaxAffine phi1(slopes, 0.5 * data.y() - half_sq);
  MaxAffine phi2(slopes, -0.5 * data.y() - half_sq);
  FitRecord meta;
  meta.method = "interpolation";
  meta.objective = c;
  return PLDCModel(std::move(phi1), std::move(phi2), data.standardizer(), std::move(meta));
}

double seminorm_bound(const PLDCModel& model) {
  return model.phi1().max_slope_l1() + model.phi2().max_slope_l1();
}

PLDCModel scale(const PLDCModel& model, double c) {
  const double m = std::abs(c);
  MaxAffine p1(m * model.phi1().slopes(), m * model.phi1().offsets());
  MaxAffine p2(m * model.phi2().slopes(), m * model.phi2().offsets());
  FitRecord meta = model.meta();
  meta.witness.reset();
  if (c < 0.0) {
    return PLDCModel(std::move(p2), std::move(p1), model.standardizer(), std::move(meta));
  }
  return PLDCModel(std::move(p1), std::move(p2), model.standardizer(), std::move(meta));
}

PLDCModel add(const PLDCModel& f, const PLDCModel& g, std::size_t plane_cap) {
  if (f.dim() != g.dim()) {
    throw DimensionError("cannot add models of dimension " + std::to_string(f.dim()) + " and " +
                         std::to_string(g.dim()));
  }
  if (f.standardizer().has_value() != g.standardizer().has_value() ||
      (f.standardizer() && !(*f.standardizer() == *g.standardizer()))) {
    throw DimensionError("cannot add models with different standardizers; fold them first");
  }
  FitRecord meta;
  meta.method = "sum";
  return PLDCModel(minkowski_sum(f.phi1(), g.phi1(), plane_cap), minkowski_sum(f.phi2(), g.phi2(), plane_cap),
                   f.standardizer(), std::move(meta));
}

namespace {

MaxAffine fold_part(const MaxAffine& part, const Standardizer& s) {
  RowMatrix slopes = part.slopes();
  for (Index c = 0; c < slopes.cols(); ++c) {
    slopes.col(c) /= s.scale[c];
  }
  const Vector offsets = part.offsets() - slopes * s.mean;
  return MaxAffine(std::move(slopes), offsets);
}

}  // namespace

PLDCModel fold_standardizer(const PLDCModel& model) {
  if (!model.standardizer()) return model;
  const auto& s = *model.standardizer();
  return PLDCModel(fold_part(model.phi1(), s), fold_part(model.phi2(), s), std::nullopt, model.meta());
}

}  // namespace pldc
