#pragma once

// Matrix and signal serialization.
//
// CSV: row-major, one matrix row per line, comma separated, every value with
// 17 significant digits so that parsing recovers the exact double. A signal
// is written as a single row.
//
// JSON envelope: {"kind", "m", "n", "seed", "normalized", "data"} with data a
// list of rows. Signals use {"n", "k", "support", "values"}.

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cskit/errors.hpp"
#include "cskit/model.hpp"

namespace cskit {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  if (text == "nan") return NAN;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

inline std::string matrix_to_csv(const Matrix& a) {
  std::string out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      out += format_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

inline Matrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    try {
      for (auto field : split_csv_line(line)) row.push_back(parse_double(field));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("csv line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidArgument("csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(rows.front().size()) + " fields, got " +
                            std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("csv document has no rows");
  Matrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return a;
}

inline nlohmann::json matrix_to_json(const MeasurementMatrix& a) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.m(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < a.n(); ++j) row.push_back(a.entries()(i, j));
    data.push_back(std::move(row));
  }
  return {{"kind", std::string(to_string(a.kind()))},
          {"m", a.m()},
          {"n", a.n()},
          {"seed", a.seed()},
          {"normalized", a.columns_normalized()},
          {"data", std::move(data)}};
}

inline MeasurementMatrix matrix_from_json(const nlohmann::json& doc) {
  try {
    const int m = doc.at("m").get<int>();
    const int n = doc.at("n").get<int>();
    const auto& data = doc.at("data");
    if (!data.is_array() || static_cast<int>(data.size()) != m)
      throw InvalidArgument("matrix json: data must hold m rows");
    Matrix a(m, n);
    for (int i = 0; i < m; ++i) {
      const auto& row = data[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw InvalidArgument("matrix json: row " + std::to_string(i) + " must hold n values");
      for (int j = 0; j < n; ++j) a(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    auto kind = MatrixKind::Custom;
    if (doc.contains("kind")) {
      const auto parsed = parse_matrix_kind(doc.at("kind").get<std::string>());
      if (!parsed) throw InvalidArgument("matrix json: unknown kind");
      kind = *parsed;
    }
    const auto seed = doc.value("seed", std::uint64_t{0});
    const bool normalized = doc.value("normalized", false);
    return MeasurementMatrix(std::move(a), kind, seed, normalized);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("matrix json: ") + e.what());
  }
}

inline std::string signal_to_csv(const Vector& x) { return matrix_to_csv(x.transpose()); }

inline SparseSignal signal_from_csv(const std::string& text) {
  const Matrix a = matrix_from_csv(text);
  if (a.rows() != 1 && a.cols() != 1) throw InvalidArgument("signal csv must be a single row or column");
  return SparseSignal::from_values(a.rows() == 1 ? Vector(a.row(0).transpose()) : Vector(a.col(0)));
}

inline nlohmann::json signal_to_json(const SparseSignal& x) {
  return {{"n", x.n()},
          {"k", x.k()},
          {"support", x.support()},
          {"values", std::vector<double>(x.values().data(), x.values().data() + x.n())}};
}

inline SparseSignal signal_from_json(const nlohmann::json& doc) {
  try {
    const auto values = doc.at("values").get<std::vector<double>>();
    Vector v = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    auto x = SparseSignal::from_values(std::move(v));
    if (doc.contains("n") && doc.at("n").get<int>() != x.n())
      throw InvalidArgument("signal json: n does not match values length");
    if (doc.contains("support") && doc.at("support").get<std::vector<int>>() != x.support())
      throw InvalidArgument("signal json: support does not match the nonzero entries");
    return x;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("signal json: ") + e.what());
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + ": file not found or unreadable");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Loads a Custom matrix from .json (envelope) or anything else as CSV.
inline MeasurementMatrix load_matrix(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".json") {
    try {
      return matrix_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument(path.string() + ": " + e.what());
    }
  }
  return MeasurementMatrix(matrix_from_csv(text), MatrixKind::Custom);
}

}  // namespace cskit
