#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "pldc/error.hpp"
#include "pldc/io.hpp"

namespace pldc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

Table read_csv(std::istream& in, const std::string& source) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  // Skip leading blank lines; an all-blank file is an empty table.
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) break;
  }
  if (blank(line)) return table;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  table.header = split_line(line);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c].empty()) {
      throw DataError(source + ": header column " + std::to_string(c + 1) + " has no name");
    }
  }
  const auto cols = static_cast<Index>(table.header.size());

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split_line(line);
    if (static_cast<Index>(cells.size()) != cols) {
      throw DataError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " fields, header has " + std::to_string(cols));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      const char* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, row[c]);
      if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(row[c])) {
        throw DataError(source + ": line " + std::to_string(line_no) + ", column '" + table.header[c] +
                        "': not a finite number: '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Index c = 0; c < cols; ++c) table.values(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  return table;
}

Table read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_csv(in, path);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const RowMatrix& values) {
  if (static_cast<Index>(header.size()) != values.cols()) throw DimensionError("csv header does not match columns");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
    out << '\n';
  }
}

LabeledTable split_target(const Table& table, const std::string& target) {
  Index col = -1;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == target) {
      if (col >= 0) throw DataError("target column '" + target + "' appears more than once");
      col = static_cast<Index>(c);
    }
  }
  if (col < 0) throw DataError("target column '" + target + "' not found in header");
  LabeledTable out;
  const Index n = table.values.rows();
  const Index d = static_cast<Index>(table.header.size()) - 1;
  out.x.resize(n, d);
  out.y = table.values.col(col);
  Index k = 0;
  for (Index c = 0; c < d + 1; ++c) {
    if (c == col) continue;
    out.x.col(k++) = table.values.col(c);
    out.feature_names.push_back(table.header[static_cast<std::size_t>(c)]);
  }
  return out;
}

}  // namespace pldc
