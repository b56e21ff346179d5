// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedpca/common.hpp"

namespace fedpca {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest text that reads back to the same double.
std::string format_double(double x);

struct Table {
  Mat X;                             // numeric feature columns
  std::vector<std::string> columns;  // feature names; generated when the file has no header
  std::vector<std::string> labels;   // one per row when a label column was requested
  bool had_header = false;
};

// Comma-separated samples x features. A first row with any non-numeric cell is a header.
// label_column is a header name or a zero-based index; that column is kept as text.
Table read_table(const std::string& path, const std::optional<std::string>& label_column = std::nullopt);
Mat ingest(const std::string& path);

}  // namespace fedpca
