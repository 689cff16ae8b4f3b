#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pldc/core.hpp"
#include "pldc/relu.hpp"
#include "pldc/select.hpp"

namespace pldc {

/// Parsed CSV: header plus a dense numeric body.
struct Table {
  std::vector<std::string> header;
  RowMatrix values;  // rows x header.size()
};

/// Comma separated, header row required, '.' decimals. Every cell must parse
/// completely as a finite double; otherwise DataError names the line and the
/// column. A file with only a header (or nothing at all) gives zero rows.
Table read_csv(std::istream& in, const std::string& source = "<input>");
Table read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const RowMatrix& values);

/// Features and response split out of a table. The response column is
/// `target` and must exist (DataError naming it otherwise).
struct LabeledTable {
  RowMatrix x;
  Vector y;
  std::vector<std::string> feature_names;
};
LabeledTable split_target(const Table& table, const std::string& target = "y");

/// Shortest decimal form that reads back as the same double.
std::string format_double(double v);

enum class Task { regression, binary, multiclass };
std::string to_string(Task task);

/// Persistent form of a fitted model.
///
/// regression / binary: one entry in `models`, classes empty for regression
/// and {negative, positive} for binary. multiclass: one model per class.
struct ModelFile {
  static constexpr int kVersion = 1;
  Task task = Task::regression;
  std::vector<std::string> feature_names;
  std::vector<double> classes;
  std::vector<PLDCModel> models;

  Index dim() const;
  /// One row per input row: the response, or the class scores.
  RowMatrix scores(const RowMatrix& x) const;
  /// Response for regression, class label otherwise.
  Vector predict(const RowMatrix& x) const;
};

void save_model(std::ostream& out, const ModelFile& file);
void save_model_file(const std::string& path, const ModelFile& file);
/// DataError on malformed JSON, a wrong version, or inconsistent shapes.
ModelFile load_model(std::istream& in);
ModelFile load_model_file(const std::string& path);

/// {"version": 1, "append_one": ..., "weights": [[[...], ...], ...], "output": [...]}
void save_relu(std::ostream& out, const ReluNet& net);
ReluNet load_relu(std::istream& in);

}  // namespace pldc
