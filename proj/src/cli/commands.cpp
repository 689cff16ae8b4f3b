#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pldc/cli.hpp"
#include "pldc/discrepancy.hpp"
#include "pldc/error.hpp"
#include "pldc/io.hpp"
#include "pldc/relu.hpp"
#include "pldc/select.hpp"

namespace pldc {

namespace {

using Report = nlohmann::ordered_json;

std::string scalar_text(const Report& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

// Text form of a report: "key: value" lines, arrays of objects as indented rows.
void render_text(std::ostream& out, const Report& r, const std::string& indent = "") {
  for (const auto& [key, v] : r.items()) {
    if (v.is_object()) {
      out << indent << key << ":\n";
      render_text(out, v, indent + "  ");
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      out << indent << key << ":\n";
      for (const auto& row : v) {
        out << indent << " ";
        for (const auto& [k, x] : row.items()) {
          out << ' ' << k << '=';
          if (x.is_array()) {
            for (std::size_t i = 0; i < x.size(); ++i) out << (i ? "," : "") << scalar_text(x[i]);
          } else {
            out << scalar_text(x);
          }
        }
        out << '\n';
      }
    } else if (v.is_array()) {
      out << indent << key << ':';
      for (const auto& x : v) out << ' ' << scalar_text(x);
      out << '\n';
    } else {
      out << indent << key << ": " << scalar_text(v) << '\n';
    }
  }
}

void emit(std::ostream& out, const Report& r, bool as_json) {
  if (as_json) {
    out << r.dump(2) << '\n';
  } else {
    render_text(out, r);
  }
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
template <class F>
void write_to(const std::string& path, std::ostream& fallback, F&& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  body(f);
  if (!f) throw DataError("write failed: " + path);
}

Metric default_metric(Loss loss) {
  switch (loss) {
    case Loss::squared: return Metric::mse;
    case Loss::absolute: return Metric::mae;
    case Loss::hinge: return Metric::misclassification;
  }
  return Metric::mse;
}

Report fit_json(const FitRecord& m) {
  return {{"lambda", m.lambda},         {"iterations", m.iterations},     {"primal_residual", m.primal_residual},
          {"dual_residual", m.dual_residual}, {"objective", m.objective}, {"variant", m.variant}};
}

Report cv_json(const CvResult& cv) {
  Report rows = Report::array();
  for (const auto& row : cv.table) {
    rows.push_back({{"lambda", row.lambda}, {"mean", row.mean}, {"stderr", row.stderr_}, {"folds", row.fold_values}});
  }
  return rows;
}

// Discrepancy of DC_1 on the split given by `seed`, then the grid from it.
std::vector<double> grid_for(const Dataset& data, std::uint64_t seed, double m_scale, std::ostream& err) {
  const auto res = discrepancy(data.x(), 1.0, random_split(data.n(), seed));
  const auto grid = lambda_grid_from(res.value, m_scale);
  if (grid.front() == 0.0) err << "warning: lambda grid is all zero (grid scale or discrepancy is 0)\n";
  return grid;
}

struct FitArgs {
  std::string data, out, target = "y", loss = "l2", fitted;
  std::optional<double> lambda;
  int cv = 0;
  double rho = 0.01, tol = 1e-6, m_scale = 1.0;
  int max_iters = 50000;
  std::uint64_t seed = 0;
  bool standardize = true;
  std::string backend = "parallel";
};

int cmd_fit(const FitArgs& a, bool as_json, std::ostream& out, std::ostream& err) {
  if (a.lambda.has_value() == (a.cv > 0)) throw DataError("fit needs exactly one of --lambda or --cv");
  const LabeledTable t = split_target(read_csv_file(a.data), a.target);
  if (t.x.rows() < 2) throw DataError(a.data + ": need at least 2 rows to fit");
  if (t.x.cols() < 1) throw DataError(a.data + ": no feature columns besides '" + a.target + "'");
  const Loss loss = parse_loss(a.loss);

  FitConfig base;
  base.rho = a.rho;
  base.tol_primal = a.tol;
  base.tol_dual = a.tol;
  base.max_iters = a.max_iters;
  base.loss = loss;
  base.backend = a.backend == "reference" ? Backend::reference : Backend::parallel;

  CvPlan plan;
  plan.folds = a.cv;
  plan.loss = loss;
  plan.seed = a.seed;
  plan.metric = default_metric(loss);
  plan.base = base;
  plan.standardize = a.standardize;

  ModelFile file;
  file.feature_names = t.feature_names;
  Report rep;
  rep["command"] = "fit";
  rep["data"] = a.data;
  rep["loss"] = to_string(loss);

  const std::set<double> labels(t.y.data(), t.y.data() + t.y.size());
  if (loss == Loss::hinge && labels.size() > 2) {
    file.task = Task::multiclass;
    const Dataset raw(t.x, t.y, t.feature_names);
    const Dataset data = a.standardize ? raw.standardized() : raw;
    plan.grid = a.lambda ? std::vector<double>{*a.lambda} : grid_for(data, a.seed, a.m_scale, err);
    const MulticlassModel mc = fit_multiclass(t.x, t.y, plan, t.feature_names);
    file.classes = mc.classes;
    file.models = mc.models;
    rep["task"] = "multiclass";
    rep["n"] = data.n();
    rep["d"] = data.d();
    if (a.cv > 0) rep["lambda_grid"] = plan.grid;
    Report per = Report::array();
    for (std::size_t c = 0; c < mc.classes.size(); ++c) {
      Report row = {{"class", mc.classes[c]}};
      row.update(fit_json(mc.models[c].meta()));
      per.push_back(row);
    }
    rep["classes"] = per;
  } else {
    Vector y = t.y;
    if (loss == Loss::hinge) {
      if (labels.size() != 2) throw DataError("hinge loss needs at least 2 distinct labels");
      file.task = Task::binary;
      file.classes.assign(labels.begin(), labels.end());
      for (Index i = 0; i < y.size(); ++i) y[i] = y[i] == file.classes[1] ? 1.0 : -1.0;
    }
    const Dataset raw(t.x, y, t.feature_names);
    const Dataset data = a.standardize ? raw.standardized() : raw;
    double lambda = a.lambda.value_or(0.0);
    rep["task"] = to_string(file.task);
    rep["n"] = data.n();
    rep["d"] = data.d();
    if (!data.dropped_duplicates().empty()) {
      err << "warning: dropped " << data.dropped_duplicates().size() << " duplicate row(s)\n";
    }
    if (a.cv > 0) {
      plan.grid = grid_for(data, a.seed, a.m_scale, err);
      const CvResult cv = cross_validate(data, plan);
      lambda = cv.best_lambda;
      rep["lambda_grid"] = plan.grid;
      rep["cv_metric"] = to_string(plan.metric);
      rep["cv"] = cv_json(cv);
    }
    FitConfig cfg = base;
    cfg.lambda = lambda;
    auto [model, fr] = fit(data, cfg);
    file.models.push_back(model);
    rep["lambda"] = lambda;
    rep["rho"] = cfg.rho;
    rep["iterations"] = fr.iterations;
    rep["converged"] = fr.converged;
    rep["primal_residual"] = fr.primal_residual;
    rep["dual_residual"] = fr.dual_residual;
    rep["objective"] = fr.objective;
    rep["variant"] = fr.variant;
  }

  // Training metric on the raw rows, through the same path as predict.
  const Vector pred = file.predict(t.x);
  const Vector score = file.task == Task::multiclass ? pred : file.scores(t.x).col(0);
  switch (file.task) {
    case Task::regression:
      rep[loss == Loss::absolute ? "training_mae" : "training_mse"] =
          metric_value(loss == Loss::absolute ? Metric::mae : Metric::mse, pred, t.y);
      break;
    default: {
      double wrong = 0.0;
      for (Index i = 0; i < t.y.size(); ++i) wrong += pred[i] != t.y[i] ? 1.0 : 0.0;
      rep["training_error_rate"] = wrong / static_cast<double>(t.y.size());
    }
  }

  save_model_file(a.out, file);
  rep["model"] = a.out;
  if (!a.fitted.empty()) {
    write_to(a.fitted, out, [&](std::ostream& o) {
      write_csv(o, {file.task == Task::regression ? "yhat" : "score"}, RowMatrix(score));
    });
  }
  emit(out, rep, as_json);
  return kExitOk;
}

// Feature block of `table` in the model's order: by name when every feature
// name is present, else positionally after removing `target` if present.
RowMatrix features_for(const ModelFile& file, const Table& table, const std::string& target) {
  const Index d = file.dim();
  if (!file.feature_names.empty()) {
    std::vector<Index> cols;
    for (const auto& name : file.feature_names) {
      const auto it = std::find(table.header.begin(), table.header.end(), name);
      if (it == table.header.end()) break;
      cols.push_back(static_cast<Index>(it - table.header.begin()));
    }
    if (static_cast<Index>(cols.size()) == d) {
      RowMatrix x(table.values.rows(), d);
      for (Index k = 0; k < d; ++k) x.col(k) = table.values.col(cols[static_cast<std::size_t>(k)]);
      return x;
    }
  }
  RowMatrix x = table.values;
  const auto it = std::find(table.header.begin(), table.header.end(), target);
  if (it != table.header.end()) x = split_target(table, target).x;
  if (x.cols() != d) {
    throw DimensionError("model expects " + std::to_string(d) + " features, data has " + std::to_string(x.cols()));
  }
  return x;
}

struct PredictArgs {
  std::string model, data, out, target = "y";
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const ModelFile file = load_model_file(a.model);
  const Table table = read_csv_file(a.data);
  if (table.header.empty()) {
    write_to(a.out, out, [](std::ostream&) {});
    return kExitOk;
  }
  const RowMatrix x = features_for(file, table, a.target);
  const Vector pred = file.predict(x);
  const RowMatrix s = file.scores(x);
  std::vector<std::string> header;
  RowMatrix body;
  if (file.task == Task::regression) {
    header = {"yhat"};
    body = RowMatrix(pred);
  } else {
    header = {"label"};
    if (file.task == Task::binary) {
      header.push_back("score");
    } else {
      for (double c : file.classes) header.push_back("score_" + format_double(c));
    }
    body.resize(x.rows(), 1 + s.cols());
    body.col(0) = pred;
    body.rightCols(s.cols()) = s;
  }
  write_to(a.out, out, [&](std::ostream& o) { write_csv(o, header, body); });
  return kExitOk;
}

struct DiscrepancyArgs {
  std::string data, target = "y";
  double L = 1.0, m_bound = 1.0 / 12.0, m_scale = 1.0;
  std::uint64_t seed = 0;
  bool standardize = false;
};

int cmd_discrepancy(const DiscrepancyArgs& a, bool as_json, std::ostream& out, std::ostream& err) {
  const Table table = read_csv_file(a.data);
  const auto it = std::find(table.header.begin(), table.header.end(), a.target);
  RowMatrix x = it == table.header.end() ? table.values : split_target(table, a.target).x;
  if (x.rows() < 2) throw DataError("discrepancy needs at least 2 rows, got " + std::to_string(x.rows()));
  if (x.cols() < 1) throw DataError("discrepancy needs at least one feature column");
  if (a.standardize) {
    const Vector mean = x.colwise().mean();
    x.rowwise() -= mean.transpose();
    for (Index k = 0; k < x.cols(); ++k) {
      const double sd = std::sqrt(x.col(k).squaredNorm() / static_cast<double>(x.rows()));
      if (sd > 0.0) x.col(k) /= sd;
    }
  }
  const auto split = random_split(x.rows(), a.seed);
  const DiscrepancyResult res = discrepancy(x, a.L, split);
  if (res.dropped) {
    err << "warning: odd number of rows; data row " << *res.dropped + 1 << " (line " << *res.dropped + 2
        << ") left out of the split\n";
  }
  // The grid is always built from D(DC_1) so it does not depend on --L.
  const double d1 = a.L == 1.0 ? res.value : (a.L > 0.0 ? res.value / a.L : discrepancy(x, 1.0, split).value);
  Report rep;
  rep["command"] = "discrepancy";
  rep["data"] = a.data;
  rep["n"] = x.rows();
  rep["d"] = x.cols();
  rep["seed"] = a.seed;
  rep["L"] = a.L;
  rep["discrepancy"] = res.value;
  rep["dropped_row"] = res.dropped ? Report(*res.dropped + 1) : Report();
  rep["lambda_grid"] = lambda_grid_from(d1, a.m_scale);
  if (d1 * a.m_scale == 0.0) err << "warning: lambda grid is all zero (grid scale or discrepancy is 0)\n";
  rep["m_bound"] = a.m_bound;
  rep["theoretical_lambda"] = theoretical_lambda(res.value, a.m_bound);
  emit(out, rep, as_json);
  return kExitOk;
}

struct SynthArgs {
  Index n = 50, d = 1;
  double noise = 0.25;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const Dataset data = generate_synthetic(a.n, a.d, a.noise, a.seed);
  std::vector<std::string> header;
  for (Index k = 0; k < a.d; ++k) header.push_back("x" + std::to_string(k + 1));
  header.push_back("y");
  RowMatrix body(data.n(), a.d + 1);
  body.leftCols(a.d) = data.x();
  body.col(a.d) = data.y();
  write_to(a.out, out, [&](std::ostream& o) { write_csv(o, header, body); });
  return kExitOk;
}

struct EvalArgs {
  std::string model, test, target = "y";
};

int cmd_eval(const EvalArgs& a, bool as_json, std::ostream& out) {
  const ModelFile file = load_model_file(a.model);
  const Table table = read_csv_file(a.test);
  const LabeledTable t = split_target(table, a.target);
  if (t.x.rows() == 0) throw DataError(a.test + ": no rows to evaluate");
  const RowMatrix x = features_for(file, table, a.target);
  Report rep;
  rep["command"] = "eval";
  rep["model"] = a.model;
  rep["test"] = a.test;
  rep["n"] = x.rows();
  const Vector pred = file.predict(x);
  if (file.task == Task::regression) {
    const Dataset test(x, t.y);
    rep["nmse"] = evaluate_nmse(file.models.front(), test);
    rep["mse"] = metric_value(Metric::mse, pred, t.y);
  } else {
    double wrong = 0.0;
    for (Index i = 0; i < t.y.size(); ++i) wrong += pred[i] != t.y[i] ? 1.0 : 0.0;
    rep["error_rate"] = wrong / static_cast<double>(t.y.size());
  }
  emit(out, rep, as_json);
  return kExitOk;
}

struct ConvertArgs {
  std::string relu, model, to, out;
};

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
  if (a.to == "pldc") {
    if (a.relu.empty()) throw DataError("convert --to pldc needs --relu");
    std::ifstream in(a.relu);
    if (!in) throw DataError("cannot open " + a.relu);
    const ReluNet net = load_relu(in);
    ModelFile file;
    file.models.push_back(relu_to_pldc(net));
    for (Index k = 0; k < net.input_dim(); ++k) file.feature_names.push_back("x" + std::to_string(k + 1));
    write_to(a.out, out, [&](std::ostream& o) { save_model(o, file); });
  } else if (a.to == "relu") {
    if (a.model.empty()) throw DataError("convert --to relu needs --model");
    const ModelFile file = load_model_file(a.model);
    if (file.task == Task::multiclass) throw DataError("convert --to relu handles single-output models only");
    write_to(a.out, out, [&](std::ostream& o) { save_relu(o, pldc_to_relu(file.models.front())); });
  } else {
    throw DataError("convert --to must be 'pldc' or 'relu'");
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Difference-of-convex piecewise-linear regression and classification"};
  app.name("pldc");
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable report");

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model from a CSV file");
  fit_cmd->add_option("--data", fa.data, "Training CSV")->required();
  fit_cmd->add_option("--out", fa.out, "Model JSON to write")->required();
  fit_cmd->add_option("--target", fa.target, "Response column")->capture_default_str();
  fit_cmd->add_option("--loss", fa.loss, "l2, l1 or hinge")->capture_default_str()->check(CLI::IsMember({"l2", "l1", "hinge"}));
  auto* lambda_opt = fit_cmd->add_option("--lambda", fa.lambda, "Regularization weight");
  fit_cmd->add_option("--cv", fa.cv, "Pick lambda by k-fold cross-validation")->excludes(lambda_opt);
  fit_cmd->add_option("--rho", fa.rho, "ADMM penalty")->capture_default_str();
  fit_cmd->add_option("--max-iters", fa.max_iters, "ADMM iteration cap")->capture_default_str();
  fit_cmd->add_option("--tol", fa.tol, "Primal and dual residual tolerance")->capture_default_str();
  fit_cmd->add_option("--grid-scale", fa.m_scale, "Multiplier m in the lambda grid")->capture_default_str();
  fit_cmd->add_option("--seed", fa.seed, "Seed for folds and the discrepancy split")->capture_default_str();
  fit_cmd->add_option("--standardize", fa.standardize, "Standardize features (true/false)")->capture_default_str();
  fit_cmd->add_option("--backend", fa.backend, "parallel or reference")->capture_default_str()->check(CLI::IsMember({"parallel", "reference"}));
  fit_cmd->add_option("--fitted", fa.fitted, "CSV of fitted values on the training rows");

  PredictArgs pa;
  auto* predict_cmd = app.add_subcommand("predict", "Apply a saved model");
  predict_cmd->add_option("--model", pa.model)->required();
  predict_cmd->add_option("--data", pa.data)->required();
  predict_cmd->add_option("--out", pa.out, "Output CSV (default stdout)");
  predict_cmd->add_option("--target", pa.target, "Column ignored if present")->capture_default_str();
  std::uint64_t unused_seed = 0;
  predict_cmd->add_option("--seed", unused_seed, "Accepted for uniformity; predict is deterministic");

  DiscrepancyArgs da;
  auto* disc_cmd = app.add_subcommand("discrepancy", "Empirical maximum discrepancy and the lambda grid");
  disc_cmd->add_option("--data", da.data)->required();
  disc_cmd->add_option("--L", da.L, "Seminorm budget")->capture_default_str()->check(CLI::NonNegativeNumber);
  disc_cmd->add_option("--seed", da.seed, "Seed for the half split")->capture_default_str();
  disc_cmd->add_option("--m-bound", da.m_bound, "M in the theoretical lambda 24 M D")->capture_default_str();
  disc_cmd->add_option("--grid-scale", da.m_scale, "Multiplier m in the lambda grid")->capture_default_str();
  disc_cmd->add_option("--target", da.target, "Column excluded if present")->capture_default_str();
  disc_cmd->add_flag("--standardize", da.standardize, "Standardize features first");

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Synthetic regression data");
  synth_cmd->add_option("--n", sa.n)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--d", sa.d)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", sa.noise, "Noise standard deviation")->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", sa.seed)->capture_default_str();
  synth_cmd->add_option("--out", sa.out, "Output CSV (default stdout)");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "NMSE or error rate on a test CSV");
  eval_cmd->add_option("--model", ea.model)->required();
  eval_cmd->add_option("--test", ea.test)->required();
  eval_cmd->add_option("--target", ea.target)->capture_default_str();
  eval_cmd->add_option("--seed", unused_seed, "Accepted for uniformity; eval is deterministic");

  ConvertArgs ca;
  auto* convert_cmd = app.add_subcommand("convert", "Between ReLU networks and PLDC models");
  convert_cmd->add_option("--relu", ca.relu, "ReLU network JSON");
  convert_cmd->add_option("--model", ca.model, "PLDC model JSON");
  convert_cmd->add_option("--to", ca.to, "pldc or relu")->required()->check(CLI::IsMember({"pldc", "relu"}));
  convert_cmd->add_option("--out", ca.out, "Output JSON (default stdout)");
  convert_cmd->add_option("--seed", unused_seed, "Accepted for uniformity; convert is deterministic");

  std::vector<const char*> argv{"pldc"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*fit_cmd) return cmd_fit(fa, as_json, out, err);
    if (*predict_cmd) return cmd_predict(pa, out);
    if (*disc_cmd) return cmd_discrepancy(da, as_json, out, err);
    if (*synth_cmd) return cmd_synth(sa, out);
    if (*eval_cmd) return cmd_eval(ea, as_json, out);
    if (*convert_cmd) return cmd_convert(ca, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace pldc
