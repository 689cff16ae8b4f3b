#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "pldc/error.hpp"
#include "pldc/io.hpp"

namespace pldc {

using nlohmann::json;

std::string to_string(Task task) {
  switch (task) {
    case Task::regression: return "regression";
    case Task::binary: return "binary";
    case Task::multiclass: return "multiclass";
  }
  return "?";
}

Index ModelFile::dim() const { return models.empty() ? 0 : models.front().dim(); }

RowMatrix ModelFile::scores(const RowMatrix& x) const {
  RowMatrix out(x.rows(), static_cast<Index>(models.size()));
  for (std::size_t c = 0; c < models.size(); ++c) out.col(static_cast<Index>(c)) = models[c].evaluate_rows(x);
  return out;
}

Vector ModelFile::predict(const RowMatrix& x) const {
  const RowMatrix s = scores(x);
  Vector out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    switch (task) {
      case Task::regression: out[i] = s(i, 0); break;
      case Task::binary: out[i] = s(i, 0) >= 0.0 ? classes[1] : classes[0]; break;
      case Task::multiclass:
        out[i] = classes[static_cast<std::size_t>(argmax_first(s.row(i).transpose()))];
        break;
    }
  }
  return out;
}

namespace {

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json matrix_json(const RowMatrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

json planes_json(const MaxAffine& f) { return {{"slopes", matrix_json(f.slopes())}, {"offsets", vector_json(f.offsets())}}; }

Vector vector_from(const json& j, const char* what) {
  if (!j.is_array()) throw DataError(std::string(what) + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw DataError(std::string(what) + ": expected numbers");
    v[static_cast<Index>(k)] = j[k].get<double>();
  }
  return v;
}

RowMatrix matrix_from(const json& j, Index cols, const char* what) {
  if (!j.is_array()) throw DataError(std::string(what) + ": expected an array of rows");
  RowMatrix m(static_cast<Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector_from(j[r], what);
    if (row.size() != cols) {
      throw DataError(std::string(what) + ": row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                      " entries, expected " + std::to_string(cols));
    }
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  return m;
}

MaxAffine planes_from(const json& j, Index dim, const char* what) {
  const RowMatrix s = matrix_from(j.at("slopes"), dim, what);
  const Vector o = vector_from(j.at("offsets"), what);
  if (s.rows() == 0 || o.size() != s.rows()) throw DataError(std::string(what) + ": slopes and offsets disagree");
  return MaxAffine(s, o);
}

json fit_json(const FitRecord& r) {
  return {{"method", r.method},
          {"loss", r.loss},
          {"lambda", r.lambda},
          {"rho", r.rho},
          {"iterations", r.iterations},
          {"primal_residual", r.primal_residual},
          {"dual_residual", r.dual_residual},
          {"objective", r.objective},
          {"variant", r.variant}};
}

FitRecord fit_from(const json& j) {
  FitRecord r;
  r.method = j.value("method", "");
  r.loss = j.value("loss", "");
  r.lambda = j.value("lambda", 0.0);
  r.rho = j.value("rho", 0.0);
  r.iterations = j.value("iterations", 0);
  r.primal_residual = j.value("primal_residual", 0.0);
  r.dual_residual = j.value("dual_residual", 0.0);
  r.objective = j.value("objective", 0.0);
  r.variant = j.value("variant", "");
  return r;
}

json parse(std::istream& in, const char* what) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

}  // namespace

void save_model(std::ostream& out, const ModelFile& file) {
  if (file.models.empty()) throw Error("model file has no models");
  const auto& st = file.models.front().standardizer();
  json models = json::array();
  for (const auto& m : file.models) {
    if (m.dim() != file.dim()) throw DimensionError("models in one file must share the input dimension");
    if (m.standardizer().has_value() != st.has_value() || (st && !(*m.standardizer() == *st))) {
      throw Error("models in one file must share the standardizer");
    }
    models.push_back({{"phi1", planes_json(m.phi1())}, {"phi2", planes_json(m.phi2())}, {"fit", fit_json(m.meta())}});
  }
  json j = {{"version", ModelFile::kVersion},
            {"task", to_string(file.task)},
            {"dim", file.dim()},
            {"feature_names", file.feature_names},
            {"classes", file.classes},
            {"standardizer", st ? json{{"mean", vector_json(st->mean)}, {"scale", vector_json(st->scale)}} : json()},
            {"models", models}};
  out << j.dump(2) << '\n';
}

void save_model_file(const std::string& path, const ModelFile& file) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save_model(out, file);
}

ModelFile load_model(std::istream& in) {
  const json j = parse(in, "model");
  try {
    if (!j.is_object()) throw DataError("model: expected a JSON object");
    if (j.value("version", -1) != ModelFile::kVersion) throw DataError("model: unsupported version");
    ModelFile file;
    const std::string task = j.at("task").get<std::string>();
    if (task == "regression") file.task = Task::regression;
    else if (task == "binary") file.task = Task::binary;
    else if (task == "multiclass") file.task = Task::multiclass;
    else throw DataError("model: unknown task '" + task + "'");
    const Index dim = j.at("dim").get<Index>();
    if (dim < 1) throw DataError("model: dim must be positive");
    file.feature_names = j.value("feature_names", std::vector<std::string>{});
    if (!file.feature_names.empty() && static_cast<Index>(file.feature_names.size()) != dim) {
      throw DataError("model: feature_names does not match dim");
    }
    file.classes = j.value("classes", std::vector<double>{});
    std::optional<Standardizer> st;
    if (!j.at("standardizer").is_null()) {
      st = Standardizer{vector_from(j["standardizer"].at("mean"), "standardizer"),
                        vector_from(j["standardizer"].at("scale"), "standardizer")};
      if (st->mean.size() != dim || st->scale.size() != dim || !(st->scale.array() > 0.0).all()) {
        throw DataError("model: invalid standardizer");
      }
    }
    for (const auto& m : j.at("models")) {
      file.models.emplace_back(planes_from(m.at("phi1"), dim, "phi1"), planes_from(m.at("phi2"), dim, "phi2"), st,
                               fit_from(m.value("fit", json::object())));
    }
    const std::size_t want = file.task == Task::multiclass ? file.classes.size() : 1;
    if (file.models.size() != want || (file.task == Task::binary && file.classes.size() != 2) ||
        (file.task == Task::multiclass && file.classes.size() < 2)) {
      throw DataError("model: class list does not match the task");
    }
    return file;
  } catch (const json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  }
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load_model(in);
}

void save_relu(std::ostream& out, const ReluNet& net) {
  net.validate();
  json layers = json::array();
  for (const auto& W : net.weights) layers.push_back(matrix_json(W));
  json j = {{"version", 1}, {"append_one", net.append_one}, {"weights", layers}, {"output", vector_json(net.output)}};
  out << j.dump(2) << '\n';
}

ReluNet load_relu(std::istream& in) {
  const json j = parse(in, "relu net");
  try {
    ReluNet net;
    net.append_one = j.value("append_one", false);
    for (const auto& layer : j.at("weights")) {
      if (!layer.is_array() || layer.empty() || !layer[0].is_array()) {
        throw DataError("relu net: each layer must be a non-empty array of rows");
      }
      net.weights.push_back(matrix_from(layer, static_cast<Index>(layer[0].size()), "relu layer"));
    }
    net.output = vector_from(j.at("output"), "relu output");
    net.validate();
    return net;
  } catch (const json::exception& e) {
    throw DataError(std::string("relu net: ") + e.what());
  }
}

}  // namespace pldc
