#pragma once

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qhm/error.hpp"
#include "qhm/metric_space.hpp"

namespace qhm {

enum class MatrixFormat { kCsv, kJson };

/// Raw matrix plus labels, before metric validation.
struct MatrixData {
  Matrix dist;
  std::vector<std::string> labels;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline Error parse_error(int line, int col, const std::string& what) {
  return Error(ErrorCode::kParse, "io",
               "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                   what);
}

}  // namespace detail

/// Parses n lines of n comma-separated decimals. Blank lines are ignored.
inline MatrixData parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    int col = 1;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string cell =
          detail::trim(line.substr(start, comma == std::string::npos ? std::string::npos
                                                                     : comma - start));
      if (cell.empty()) throw detail::parse_error(line_no, col, "empty field");
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw detail::parse_error(line_no, col, "not a number: '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFinite, "io",
                    "line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                        ": non-finite value '" + cell + "'");
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
      ++col;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw detail::parse_error(line_no, static_cast<int>(row.size()),
                                "row has " + std::to_string(row.size()) +
                                    " fields, expected " +
                                    std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw detail::parse_error(line_no, 0, "no data");
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (static_cast<Eigen::Index>(rows.front().size()) != n) {
    throw Error(ErrorCode::kDimension, "io",
                "matrix is " + std::to_string(n) + "x" +
                    std::to_string(rows.front().size()) + ", expected square");
  }
  MatrixData out{Matrix(n, n), {}};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out.dist(i, j) = rows[i][j];
  return out;
}

/// Parses {"labels": [...], "dist": [[...], ...]}; "labels" is optional.
inline MatrixData parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, "io", e.what());
  }
  if (!doc.is_object() || !doc.contains("dist") || !doc["dist"].is_array()) {
    throw Error(ErrorCode::kParse, "io", "expected an object with a \"dist\" array");
  }
  const auto& rows = doc["dist"];
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw Error(ErrorCode::kDimension, "io", "empty matrix");
  MatrixData out{Matrix(n, n), {}};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw Error(ErrorCode::kDimension, "io",
                  "row " + std::to_string(i) + " does not have " + std::to_string(n) +
                      " entries");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& cell = row[static_cast<std::size_t>(j)];
      // nlohmann rejects NaN/Infinity literals at parse time; strings or
      // nulls standing in for them land here.
      if (!cell.is_number()) {
        throw Error(ErrorCode::kNonFinite, "io",
                    "entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is not a finite number");
      }
      out.dist(i, j) = cell.get<double>();
    }
  }
  if (doc.contains("labels") && !doc["labels"].is_null()) {
    const auto& labels = doc["labels"];
    if (!labels.is_array() ||
        (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != n)) {
      throw Error(ErrorCode::kDimension, "io",
                  "\"labels\" must be an array of " + std::to_string(n) + " strings");
    }
    for (const auto& l : labels) {
      if (!l.is_string()) throw Error(ErrorCode::kParse, "io", "labels must be strings");
      out.labels.push_back(l.get<std::string>());
    }
  }
  return out;
}

inline MatrixData parse_matrix(const std::string& text, MatrixFormat fmt) {
  return fmt == MatrixFormat::kCsv ? parse_csv(text) : parse_json(text);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, "io", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Guesses the format from the file extension; JSON for ".json", CSV otherwise.
inline MatrixFormat format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".json") return MatrixFormat::kJson;
  return MatrixFormat::kCsv;
}

inline MetricSpace load_space(const std::string& path, MatrixFormat fmt,
                              double triangle_rel = Tolerances{}.triangle_rel) {
  auto data = parse_matrix(read_file(path), fmt);
  return MetricSpace(std::move(data.dist), std::move(data.labels), triangle_rel);
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  std::string s = ss.str();
  // Prefer the short form when it round-trips (6 -> "6", not "6.0000...").
  for (int p = 1; p < std::numeric_limits<double>::max_digits10; ++p) {
    std::ostringstream t;
    t << std::setprecision(p) << v;
    if (std::strtod(t.str().c_str(), nullptr) == v) return t.str();
  }
  return s;
}

inline std::string to_csv(const Matrix& dist) {
  std::string out;
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    for (Eigen::Index j = 0; j < dist.cols(); ++j) {
      if (j) out += ',';
      out += format_double(dist(i, j));
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json space_to_json(const MetricSpace& space) {
  nlohmann::json doc;
  doc["labels"] = space.labels();
  doc["dist"] = matrix_to_json(space.dist());
  return doc;
}

inline std::string to_json_text(const MetricSpace& space) {
  return space_to_json(space).dump(2) + "\n";
}

inline std::string serialize(const MetricSpace& space, MatrixFormat fmt) {
  return fmt == MatrixFormat::kCsv ? to_csv(space.dist()) : to_json_text(space);
}

}  // namespace qhm
