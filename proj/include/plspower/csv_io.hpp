#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "plspower/preprocess.hpp"

namespace plspower {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& cell, double* out) {
  std::string t = trim(cell);
  if (t.empty()) return false;
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) return false;
  *out = v;
  return true;
}

/// 17 significant digits: enough for doubles to round-trip exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Writes a header row plus the matrix, with an optional label column.
inline void save_csv(const std::string& path, const Matrix& x,
                     const std::vector<std::string>& variable_names,
                     const std::vector<int>& labels = {},
                     const std::string& label_column = "class") {
  std::ofstream out(path);
  if (!out) fail(errc::invalid_input, "save_csv: cannot open " + path);
  for (Index j = 0; j < x.cols(); ++j) {
    if (j > 0) out << ',';
    out << (j < static_cast<Index>(variable_names.size())
                ? variable_names[static_cast<std::size_t>(j)]
                : "v" + std::to_string(j + 1));
  }
  if (!labels.empty()) out << ',' << label_column;
  out << '\n';
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out << ',';
      out << detail::format_double(x(i, j));
    }
    if (!labels.empty()) out << ',' << labels[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

inline void save_dataset_csv(const std::string& path, const Dataset& d,
                             const std::string& label_column = "class") {
  save_csv(path, d.x, d.variable_names, d.labels, label_column);
}

/// Strict CSV reader: rectangular, header row, every data cell numeric.
/// When `label_column` is non-empty that column becomes the class labels;
/// values may be the literals 1/2 or any two distinct strings, mapped to
/// classes 1 and 2 in order of first appearance (mapping kept on the
/// Dataset for report echoing).
inline Dataset load_csv(const std::string& path, const std::string& label_column = "") {
  std::ifstream in(path);
  if (!in) fail(errc::malformed_csv, "load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) fail(errc::malformed_csv, "load_csv: empty file " + path);
  std::vector<std::string> header = detail::split_csv_line(line);
  for (auto& h : header) h = detail::trim(h);
  if (header.empty()) fail(errc::malformed_csv, "load_csv: empty header row");

  std::ptrdiff_t label_index = -1;
  if (!label_column.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == label_column) label_index = static_cast<std::ptrdiff_t>(j);
    if (label_index < 0)
      fail(errc::missing_label_column, "load_csv: no column named '" + label_column + "'");
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      fail(errc::malformed_csv, "load_csv: row " + std::to_string(line_no) + " has " +
                                    std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (static_cast<std::ptrdiff_t>(j) == label_index) {
        raw_labels.push_back(detail::trim(cells[j]));
        continue;
      }
      double v = 0.0;
      if (!detail::parse_double(cells[j], &v))
        fail(errc::malformed_csv, "load_csv: non-numeric cell at row " + std::to_string(line_no) +
                                      ", column '" + header[j] + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(errc::malformed_csv, "load_csv: no data rows in " + path);

  Dataset d;
  d.x.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      d.x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  require_finite(d.x, "load_csv");

  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<std::ptrdiff_t>(j) != label_index) d.variable_names.push_back(header[j]);

  if (label_index >= 0) {
    bool literal = true;
    for (const std::string& s : raw_labels)
      if (s != "1" && s != "2") literal = false;
    if (literal) {
      for (const std::string& s : raw_labels) d.labels.push_back(s == "1" ? 1 : 2);
    } else {
      std::vector<std::string> seen;
      for (const std::string& s : raw_labels) {
        std::size_t k = 0;
        while (k < seen.size() && seen[k] != s) ++k;
        if (k == seen.size()) {
          if (seen.size() == 2)
            fail(errc::more_than_two_classes,
                 "load_csv: label column has more than two distinct values");
          seen.push_back(s);
        }
        d.labels.push_back(static_cast<int>(k) + 1);
      }
      d.label_mapping = seen;
    }
    validate_labels(d.labels, d.x.rows());
  }
  return d;
}

}  // namespace plspower
