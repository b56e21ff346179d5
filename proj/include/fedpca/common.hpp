// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fedpca {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct CapacityError : std::length_error {
  using std::length_error::length_error;
};
struct LevelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct AccessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// ceil(log2(x)) for x >= 1
inline int ceil_log2(std::size_t x) {
  if (x <= 1) return 0;
  return static_cast<int>(std::bit_width(x - 1));
}

inline int exact_log2(std::size_t x) { return static_cast<int>(std::bit_width(x)) - 1; }

inline bool is_pow2(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

}  // namespace fedpca
