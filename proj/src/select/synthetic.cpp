#include <cmath>
#include <numbers>
#include <random>

#include "pldc/error.hpp"
#include "pldc/select.hpp"

namespace pldc {

double synthetic_target(const VectorRef& x) {
  const double root_d = std::sqrt(static_cast<double>(x.size()));
  const double s = x.sum() / root_d;
  return std::sin(std::numbers::pi * s) + s * s;
}

Dataset generate_synthetic(Index n, Index d, double noise_sd, std::uint64_t seed) {
  if (n < 1 || d < 1) throw DimensionError("synthetic data needs n >= 1 and d >= 1");
  if (!(noise_sd >= 0.0)) throw Error("noise_sd must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RowMatrix x(n, d);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) x(i, k) = gauss(rng);
  }
  for (Index i = 0; i < n; ++i) {
    y[i] = synthetic_target(x.row(i).transpose());
    if (noise_sd > 0.0) y[i] += noise_sd * gauss(rng);
  }
  return Dataset(std::move(x), std::move(y));
}

double evaluate_nmse(const PLDCModel& model, const Dataset& test) {
  if (test.n() == 0) throw DataError("NMSE needs a non-empty test set");
  if (test.standardizer()) throw DataError("NMSE expects test inputs in raw coordinates");
  const Vector& y = test.y();
  const double var = (y.array() - y.mean()).square().mean();
  if (!(var > 0.0)) throw DataError("NMSE is undefined for a test set with zero variance");
  const Vector pred = model.evaluate_rows(test.x());
  return 100.0 * (pred - y).squaredNorm() / static_cast<double>(y.size()) / var;
}

}  // namespace pldc
