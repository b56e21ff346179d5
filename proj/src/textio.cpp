// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/textio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fedpca {

std::string format_double(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  std::string out = s.substr(a, b - a);
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  double v = 0;
  auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

Table read_table(const std::string& path, const std::optional<std::string>& label_column) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open dataset: " + path);
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    rows.emplace_back(lineno, split_line(line));
  }
  if (rows.empty()) throw DataError("dataset is empty: " + path);

  Table t;
  const std::size_t width = rows.front().second.size();
  for (const auto& cell : rows.front().second)
    if (!parse_number(cell)) t.had_header = true;

  std::vector<std::string> names;
  if (t.had_header) {
    names = rows.front().second;
  } else {
    for (std::size_t j = 0; j < width; ++j) names.push_back("x" + std::to_string(j + 1));
  }

  std::optional<std::size_t> label;
  if (label_column) {
    for (std::size_t j = 0; j < names.size(); ++j)
      if (t.had_header && names[j] == *label_column) label = j;
    if (!label) {
      auto idx = parse_number(*label_column);
      if (idx && *idx >= 0 && *idx == std::floor(*idx) && *idx < static_cast<double>(width))
        label = static_cast<std::size_t>(*idx);
    }
    if (!label) throw DataError("unknown label column: " + *label_column);
  }

  const std::size_t first = t.had_header ? 1 : 0;
  const std::size_t n = rows.size() - first;
  if (n == 0) throw DataError("dataset has a header but no rows: " + path);
  const std::size_t m = width - (label ? 1 : 0);
  if (m == 0) throw DataError("dataset has no feature columns: " + path);
  for (std::size_t j = 0; j < width; ++j)
    if (!label || j != *label) t.columns.push_back(names[j]);
  t.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [ln, cells] = rows[first + i];
    if (cells.size() != width)
      throw DataError("row " + std::to_string(ln) + " has " + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(width));
    std::size_t col = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (label && j == *label) {
        t.labels.push_back(cells[j]);
        continue;
      }
      auto v = parse_number(cells[j]);
      if (!v)
        throw DataError("non-numeric cell at row " + std::to_string(ln) + ", column " + std::to_string(j + 1) + ": '" +
                        cells[j] + "'");
      t.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col++)) = *v;
    }
  }
  return t;
}

Mat ingest(const std::string& path) { return read_table(path).X; }

}  // namespace fedpca
