#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pldc/error.hpp"
#include "pldc/select.hpp"

namespace pldc {

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::mse: return "mse";
    case Metric::mae: return "mae";
    case Metric::misclassification: return "misclassification";
  }
  return "?";
}

void CvPlan::validate(Index n) const {
  if (grid.empty()) throw Error("cross-validation grid is empty");
  if (folds < 2) throw Error("cross-validation needs at least 2 folds");
  if (folds > n) {
    throw DataError("cannot split " + std::to_string(n) + " points into " + std::to_string(folds) + " folds");
  }
  // The largest held-out fold has ceil(n / k) points.
  const Index largest = (n + folds - 1) / folds;
  if (n - largest < 2) {
    throw DataError("a training split would have fewer than 2 points (n = " + std::to_string(n) +
                    ", folds = " + std::to_string(folds) + ")");
  }
  base.validate();
}

std::vector<int> assign_folds(Index n, int k, std::uint64_t seed) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (Index pos = 0; pos < n; ++pos) fold[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = static_cast<int>(pos % k);
  return fold;
}

double evaluate_internal(const PLDCModel& model, const VectorRef& x) {
  return model.phi1().value(x) - model.phi2().value(x);
}

double metric_value(Metric metric, const Vector& prediction, const Vector& truth) {
  if (prediction.size() != truth.size() || truth.size() == 0) throw DimensionError("metric: length mismatch");
  switch (metric) {
    case Metric::mse: return (prediction - truth).squaredNorm() / static_cast<double>(truth.size());
    case Metric::mae: return (prediction - truth).cwiseAbs().mean();
    case Metric::misclassification: {
      double wrong = 0.0;
      for (Index i = 0; i < truth.size(); ++i) {
        const double label = prediction[i] >= 0.0 ? 1.0 : -1.0;
        wrong += label != truth[i] ? 1.0 : 0.0;
      }
      return wrong / static_cast<double>(truth.size());
    }
  }
  return 0.0;
}

CvResult cross_validate(const Dataset& data, const CvPlan& plan) {
  plan.validate(data.n());
  const Index n = data.n();
  const int k = plan.folds;
  const auto fold = assign_folds(n, k, plan.seed);

  std::vector<std::vector<Index>> train(static_cast<std::size_t>(k)), test(static_cast<std::size_t>(k));
  for (Index i = 0; i < n; ++i) {
    for (int f = 0; f < k; ++f) {
      (fold[static_cast<std::size_t>(i)] == f ? test : train)[static_cast<std::size_t>(f)].push_back(i);
    }
  }

  const std::size_t G = plan.grid.size();
  const std::size_t tasks = G * static_cast<std::size_t>(k);
  std::vector<double> value(tasks, 0.0);
  std::vector<std::string> failure(tasks);

  // Independent fits; results land in fixed slots so the reduce is ordered.
#pragma omp parallel for schedule(dynamic)
  for (std::size_t task = 0; task < tasks; ++task) {
    const std::size_t g = task / static_cast<std::size_t>(k);
    const std::size_t f = task % static_cast<std::size_t>(k);
    try {
      const Dataset tr = data.subset(train[f]);
      FitConfig cfg = plan.base;
      cfg.lambda = plan.grid[g];
      cfg.loss = plan.loss;
      AdmmSolver solver(tr, cfg);
      solver.run();
      const PLDCModel model = solver.model();
      Vector pred(static_cast<Index>(test[f].size())), truth(static_cast<Index>(test[f].size()));
      for (std::size_t r = 0; r < test[f].size(); ++r) {
        pred[static_cast<Index>(r)] = evaluate_internal(model, data.x().row(test[f][r]).transpose());
        truth[static_cast<Index>(r)] = data.y()[test[f][r]];
      }
      value[task] = metric_value(plan.metric, pred, truth);
    } catch (const std::exception& e) {
      failure[task] = e.what();
    }
  }
  for (std::size_t task = 0; task < tasks; ++task) {
    if (!failure[task].empty()) throw DivergenceError("cross-validation fit failed: " + failure[task]);
  }

  CvResult res;
  for (std::size_t g = 0; g < G; ++g) {
    CvRow row;
    row.lambda = plan.grid[g];
    for (int f = 0; f < k; ++f) row.fold_values.push_back(value[g * static_cast<std::size_t>(k) + static_cast<std::size_t>(f)]);
    const double kk = static_cast<double>(k);
    row.mean = std::accumulate(row.fold_values.begin(), row.fold_values.end(), 0.0) / kk;
    double ss = 0.0;
    for (double v : row.fold_values) ss += (v - row.mean) * (v - row.mean);
    row.stderr_ = std::sqrt(ss / (kk - 1.0)) / std::sqrt(kk);
    res.table.push_back(std::move(row));
  }
  double best = res.table.front().mean;
  for (const auto& row : res.table) best = std::min(best, row.mean);
  const double slack = 1e-9 * std::max(1.0, std::abs(best));
  bool found = false;
  for (const auto& row : res.table) {
    if (row.mean <= best + slack && (!found || row.lambda > res.best_lambda)) {
      res.best_lambda = row.lambda;
      found = true;
    }
  }
  return res;
}

}  // namespace pldc
