#include <algorithm>
#include <set>

#include "pldc/error.hpp"
#include "pldc/select.hpp"

namespace pldc {

Index argmax_first(const Vector& scores) {
  Index best = 0;
  for (Index c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

Vector MulticlassModel::scores(const VectorRef& x) const {
  Vector out(static_cast<Index>(models.size()));
  for (std::size_t c = 0; c < models.size(); ++c) out[static_cast<Index>(c)] = models[c].evaluate(x);
  return out;
}

Index MulticlassModel::predict_index(const VectorRef& x) const { return argmax_first(scores(x)); }

double MulticlassModel::predict_class(const VectorRef& x) const {
  return classes[static_cast<std::size_t>(predict_index(x))];
}

MulticlassModel fit_multiclass(const RowMatrix& x, const Vector& labels, const CvPlan& plan,
                               std::vector<std::string> feature_names) {
  const std::set<double> distinct(labels.data(), labels.data() + labels.size());
  if (distinct.size() < 2) throw DataError("classification needs at least 2 classes");
  if (plan.grid.empty()) throw Error("lambda grid is empty");

  const Dataset raw(x, labels, std::move(feature_names));
  const Dataset data = plan.standardize ? raw.standardized() : raw;

  MulticlassModel out;
  out.classes.assign(distinct.begin(), distinct.end());
  for (double cls : out.classes) {
    Vector y(data.n());
    for (Index i = 0; i < data.n(); ++i) y[i] = data.y()[i] == cls ? 1.0 : -1.0;
    const Dataset binary = data.with_y(y);

    double lambda = plan.grid.front();
    if (plan.grid.size() > 1) {
      CvPlan sub = plan;
      sub.loss = Loss::hinge;
      sub.metric = Metric::misclassification;
      lambda = cross_validate(binary, sub).best_lambda;
    }
    FitConfig cfg = plan.base;
    cfg.lambda = lambda;
    auto [model, report] = fit_hinge_binary(binary, cfg);
    FitRecord meta = model.meta();
    meta.variant += ";one-vs-rest";
    out.models.push_back(model.with_meta(std::move(meta)));
    out.lambdas.push_back(lambda);
  }
  return out;
}

}  // namespace pldc
