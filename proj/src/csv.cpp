#include "blockmax/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "blockmax/error.hpp"

namespace blockmax {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s == "nan" || s == "NaN") {
    out = std::nan("");
    return true;
  }
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && first != last;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(is, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split(t);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_number(fields[i], row[i]);
    if (first) {
      first = false;
      cols = fields.size();
      if (!numeric) {
        table.header = fields;
        continue;
      }
    }
    if (!numeric || fields.size() != cols) {
      fail(Errc::io_error, "csv: malformed row at line " + std::to_string(line_no));
    }
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }
  require(rows > 0, Errc::io_error, "csv: no data rows");
  table.values = Matrix(rows, cols, std::move(data));
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  return read_csv(in);
}

Matrix data_columns(const CsvTable& table) {
  const bool indexed = !table.header.empty() && (table.header[0] == "t" || table.header[0] == "start");
  if (!indexed) return table.values;
  require(table.values.cols() >= 2, Errc::io_error, "csv: index column without data columns");
  Matrix out(table.values.rows(), table.values.cols() - 1);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = table.values(i, j + 1);
  }
  return out;
}

void write_series_csv(std::ostream& os, const Matrix& series) {
  os << 't';
  for (std::size_t j = 0; j < series.cols(); ++j) os << ",x" << j + 1;
  os << '\n';
  for (std::size_t i = 0; i < series.rows(); ++i) {
    os << i + 1;
    for (std::size_t j = 0; j < series.cols(); ++j) os << ',' << format_double(series(i, j));
    os << '\n';
  }
}

void write_blockmax_csv(std::ostream& os, const BlockMaxSample& sample) {
  os << "start";
  for (std::size_t j = 0; j < sample.maxima.cols(); ++j) os << ",m" << j + 1;
  os << '\n';
  for (std::size_t i = 0; i < sample.size(); ++i) {
    os << sample.start_indices[i];
    for (std::size_t j = 0; j < sample.maxima.cols(); ++j) os << ',' << format_double(sample.maxima(i, j));
    os << '\n';
  }
}

}  // namespace blockmax
