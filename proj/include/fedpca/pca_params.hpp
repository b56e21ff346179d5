// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "fedpca/approx.hpp"
#include "fedpca/common.hpp"
#include "fedpca/enclinalg.hpp"

namespace fedpca {

enum class Strategy { Auto, Precomp, Seq };
std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& s);

struct PcaParams {
  std::size_t p = 10;     // power iterations
  std::size_t w = 5;      // QR iterations per eigenvalue
  std::size_t psi = 4;    // principal components
  std::size_t alpha = 4;  // oversampling
  double xi = 4.0;        // network factor for the QR / DQR choice
  Strategy strategy = Strategy::Auto;
  std::uint64_t sketch_seed = 1;
  ApproxMode approx = ApproxMode::Chebyshev;
  bool auto_intervals = true;
  double interval_factor = 2.0;  // safety factor on the fitted ranges
  LinalgSpecs specs;

  std::size_t rho() const { return psi + alpha; }
  void validate(std::size_t n, std::size_t m) const;
};

// rho x n count sketch: one +-1 per column at a seeded row.
Mat count_sketch(std::size_t rho, std::size_t n, std::uint64_t seed);

}  // namespace fedpca
