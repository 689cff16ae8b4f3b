#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pldc/admm.hpp"
#include "pldc/core.hpp"
#include "pldc/dataset.hpp"

namespace pldc {

enum class Metric { mse, mae, misclassification };

std::string to_string(Metric metric);

struct CvPlan {
  int folds = 5;
  std::vector<double> grid;
  Loss loss = Loss::squared;
  std::uint64_t seed = 0;
  Metric metric = Metric::mse;
  /// rho, iteration cap and tolerances for every fit; lambda and loss are
  /// overwritten per grid point.
  FitConfig base;
  /// Used by fit_multiclass only; cross_validate takes the data as given.
  bool standardize = true;

  void validate(Index n) const;
};

struct CvRow {
  double lambda = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> fold_values;
};

struct CvResult {
  double best_lambda = 0.0;
  std::vector<CvRow> table;  // grid order
};

/// Fold of each row: a seeded shuffle, then position modulo k. Every row
/// lands in exactly one fold and fold sizes differ by at most one.
std::vector<int> assign_folds(Index n, int k, std::uint64_t seed);

/// k-fold CV over plan.grid. The best lambda minimises the mean held-out
/// metric; near-ties (within 1e-9 relative) go to the largest lambda.
/// Fails if some training split would have fewer than 2 points.
CvResult cross_validate(const Dataset& data, const CvPlan& plan);

/// phi1 - phi2 on inputs already in the model's internal coordinates.
double evaluate_internal(const PLDCModel& model, const VectorRef& x);

double metric_value(Metric metric, const Vector& prediction, const Vector& truth);

/// One-vs-rest scores; predict returns the label with the largest score,
/// ties to the smallest class index.
struct MulticlassModel {
  std::vector<double> classes;
  std::vector<PLDCModel> models;
  std::vector<double> lambdas;

  Vector scores(const VectorRef& x) const;
  Index predict_index(const VectorRef& x) const;
  double predict_class(const VectorRef& x) const;
};

Index argmax_first(const Vector& scores);

/// Trains one hinge model per class (class c -> +1, rest -> -1). With more
/// than one grid value each class picks its own lambda by CV on
/// misclassification. Labels are compared exactly.
MulticlassModel fit_multiclass(const RowMatrix& x, const Vector& labels, const CvPlan& plan,
                               std::vector<std::string> feature_names = {});

/// sin(pi / sqrt(d) * sum x) + (sum x / sqrt(d))^2
double synthetic_target(const VectorRef& x);

/// x ~ N(0, I), y = target(x) + N(0, noise_sd^2); bit-reproducible per seed.
Dataset generate_synthetic(Index n, Index d, double noise_sd, std::uint64_t seed);

/// 100 * MSE / Var(y) with population variance. test.x() must be in raw
/// coordinates (no standardizer); the model applies its own.
double evaluate_nmse(const PLDCModel& model, const Dataset& test);

}  // namespace pldc
