#include <set>

#include <gtest/gtest.h>

#include "pldc/discrepancy.hpp"
#include "pldc/error.hpp"
#include "pldc/select.hpp"
#include "support.hpp"

using namespace pldc;
using pldc::testing::random_instance;
using pldc::testing::vec;

namespace {

CvPlan quick_plan(std::vector<double> grid, int folds = 3) {
  CvPlan plan;
  plan.folds = folds;
  plan.grid = std::move(grid);
  plan.base.max_iters = 3000;
  return plan;
}

}  // namespace

TEST(Folds, Partition) {
  const auto f = assign_folds(23, 5, 9);
  ASSERT_EQ(f.size(), 23u);
  std::vector<int> count(5, 0);
  for (int v : f) {
    ASSERT_GE(v, 0);
    ASSERT_LT(v, 5);
    ++count[static_cast<std::size_t>(v)];
  }
  EXPECT_LE(*std::max_element(count.begin(), count.end()) - *std::min_element(count.begin(), count.end()), 1);
  EXPECT_EQ(f, assign_folds(23, 5, 9));
}

TEST(CrossValidate, ConstantTargetTiesGoToLargestLambda) {
  RowMatrix x(9, 1);
  for (Index i = 0; i < 9; ++i) x(i, 0) = static_cast<double>(i);
  const Dataset data(x, Vector::Constant(9, 2.0));
  const CvResult r = cross_validate(data, quick_plan({0.01, 1.0, 0.1}));
  for (const auto& row : r.table) EXPECT_NEAR(row.mean, 0.0, 1e-6);
  EXPECT_EQ(r.best_lambda, 1.0);
}

TEST(CrossValidate, LeaveOneOut) {
  const Dataset data = random_instance(3, 6, 1);
  const CvResult r = cross_validate(data, quick_plan({0.1, 1.0}, 6));
  for (const auto& row : r.table) {
    EXPECT_TRUE(std::isfinite(row.mean));
    EXPECT_EQ(row.fold_values.size(), 6u);
  }
}

TEST(CrossValidate, RejectsTooManyFolds) {
  const Dataset data = random_instance(3, 4, 1);
  EXPECT_THROW(cross_validate(data, quick_plan({0.1}, 5)), DataError);
  EXPECT_THROW(cross_validate(random_instance(3, 3, 1), quick_plan({0.1}, 2)), DataError);
}

TEST(CrossValidate, BestIsInGrid) {
  const Dataset data = generate_synthetic(20, 1, 0.25, 4).standardized();
  const std::vector<double> grid{4.0, 1.0, 0.25};
  const CvResult r = cross_validate(data, quick_plan(grid));
  EXPECT_NE(std::find(grid.begin(), grid.end(), r.best_lambda), grid.end());
  double best = 1e300;
  for (const auto& row : r.table) best = std::min(best, row.mean);
  for (const auto& row : r.table) {
    if (row.lambda == r.best_lambda) EXPECT_LE(row.mean, best + 1e-9 * std::max(1.0, best));
  }
}

TEST(Metric, Values) {
  EXPECT_DOUBLE_EQ(metric_value(Metric::mse, vec({1, 2}), vec({0, 0})), 2.5);
  EXPECT_DOUBLE_EQ(metric_value(Metric::mae, vec({1, -2}), vec({0, 0})), 1.5);
  EXPECT_DOUBLE_EQ(metric_value(Metric::misclassification, vec({0.0, -0.1, 3}), vec({1, 1, -1})), 2.0 / 3.0);
}

namespace {

void blobs(std::uint64_t seed, Index per, RowMatrix& x, Vector& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  const double cx[3] = {0, 3, 0}, cy[3] = {0, 0, 3};
  x.resize(3 * per, 2);
  y.resize(3 * per);
  for (Index c = 0; c < 3; ++c) {
    for (Index i = 0; i < per; ++i) {
      x(c * per + i, 0) = cx[c] + g(rng);
      x(c * per + i, 1) = cy[c] + g(rng);
      y[c * per + i] = static_cast<double>(c + 1);
    }
  }
}

}  // namespace

TEST(Multiclass, SeparatedBlobs) {
  RowMatrix x;
  Vector y;
  blobs(5, 20, x, y);
  CvPlan plan = quick_plan({0.01});
  const MulticlassModel m = fit_multiclass(x, y, plan);
  ASSERT_EQ(m.classes.size(), 3u);
  int right = 0;
  for (Index i = 0; i < x.rows(); ++i) right += m.predict_class(x.row(i).transpose()) == y[i] ? 1 : 0;
  EXPECT_GE(right, static_cast<int>(0.95 * static_cast<double>(x.rows())));
  EXPECT_NE(m.models[0].meta().variant.find("one-vs-rest"), std::string::npos);
}

TEST(Multiclass, SingleClassRejected) {
  EXPECT_THROW(fit_multiclass(RowMatrix::Zero(4, 1), Vector::Ones(4), quick_plan({0.1})), DataError);
}

TEST(Multiclass, TwoClassesMatchBinarySign) {
  const Dataset d = random_instance(8, 10, 2, true);
  CvPlan plan = quick_plan({0.1});
  const MulticlassModel m = fit_multiclass(d.x(), d.y(), plan);
  FitConfig cfg = plan.base;
  cfg.lambda = 0.1;
  auto [binary, rep] = fit_hinge_binary(d.standardized(), cfg);
  for (Index i = 0; i < d.n(); ++i) {
    const Vector xi = d.x().row(i).transpose();
    const double s = binary.evaluate(xi);
    if (std::abs(s) > 1e-6) EXPECT_EQ(m.predict_class(xi), s > 0 ? 1.0 : -1.0);
  }
}

TEST(Multiclass, ArgmaxShiftInvariantAndFirstTie) {
  const Vector s = vec({0.5, 2.0, 2.0, -1.0});
  EXPECT_EQ(argmax_first(s), 1);
  EXPECT_EQ(argmax_first((s.array() + 7.25).matrix()), 1);
}

TEST(Synthetic, FormulaValues) {
  EXPECT_EQ(synthetic_target(vec({0, 0, 0})), 0.0);
  EXPECT_NEAR(synthetic_target(vec({0.5})), 1.25, 1e-15);
}

TEST(Synthetic, Reproducible) {
  const Dataset a = generate_synthetic(30, 2, 0.25, 17), b = generate_synthetic(30, 2, 0.25, 17);
  EXPECT_TRUE(a.x() == b.x());
  EXPECT_TRUE(a.y() == b.y());
  const Dataset c = generate_synthetic(30, 2, 0.0, 17);
  for (Index i = 0; i < 30; ++i) EXPECT_EQ(c.y()[i], synthetic_target(c.x().row(i).transpose()));
}

TEST(Nmse, Normalization) {
  const Dataset test = generate_synthetic(4000, 1, 0.0, 3);
  const double mean = test.y().mean();
  const PLDCModel flat(MaxAffine::constant(1, mean), MaxAffine::constant(1, 0.0));
  EXPECT_NEAR(evaluate_nmse(flat, test), 100.0, 1e-9);
  const PLDCModel worse(MaxAffine::constant(1, mean + 5.0), MaxAffine::constant(1, 0.0));
  EXPECT_GT(evaluate_nmse(worse, test), 100.0);
  // Train mean on an independent sample stays close to 100.
  const double train_mean = generate_synthetic(4000, 1, 0.0, 4).y().mean();
  const PLDCModel tm(MaxAffine::constant(1, train_mean), MaxAffine::constant(1, 0.0));
  EXPECT_NEAR(evaluate_nmse(tm, test), 100.0, 5.0);
}

TEST(Nmse, PerfectModelIsZero) {
  RowMatrix x(3, 1);
  x << 0, 1, 2;
  const Dataset test(x, vec({1, 3, 5}));
  RowMatrix s(1, 1);
  s << 2;
  const PLDCModel line(MaxAffine(s, vec({1})), MaxAffine::constant(1, 0.0));
  EXPECT_EQ(evaluate_nmse(line, test), 0.0);
}

TEST(CrossValidate, BestLambdaUsuallyInterior) {
  int interior = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset data = generate_synthetic(50, 2, 0.25, seed).standardized();
    CvPlan plan;
    plan.folds = 5;
    plan.loss = Loss::absolute;
    plan.metric = Metric::mae;
    plan.seed = seed;
    plan.base.max_iters = 2000;
    plan.grid = lambda_grid_from(discrepancy(data.x(), 1.0, random_split(data.n(), seed)).value);
    const CvResult r = cross_validate(data, plan);
    if (r.best_lambda != plan.grid.front() && r.best_lambda != plan.grid.back()) ++interior;
  }
  EXPECT_GE(interior, 12);
}
