// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fedpca/backend.hpp"

namespace fedpca {

enum class NonLinear { Sign, Sqrt, InvSqrt };

std::string nonlinear_name(NonLinear f);
NonLinear parse_nonlinear(const std::string& s);

struct ApproxSpec {
  NonLinear fn = NonLinear::Sqrt;
  double lo = 0;
  double hi = 1;
  int degree = 31;
  // sign only: smallest |x| to resolve; 0 means a tenth of max |x|
  double min_magnitude = 0;
  void validate() const;
  // interval handed to the inverse square root inside sign
  std::pair<double, double> sign_square_interval() const;
};

// exact: same operation trace and charges, exact function values in the slots
enum class ApproxMode { Exact, Chebyshev };

std::vector<double> chebyshev_fit(const std::function<double(double)>& f, double lo, double hi, int degree);
double clenshaw(const std::vector<double>& coeffs, double lo, double hi, double x);

// levels consumed by eval_poly_bsgs for a degree-d polynomial
int poly_depth(int degree);
double poly_mult_bound(int degree);

Ciphertext eval_poly_bsgs(Backend& be, const Ciphertext& x, const std::vector<double>& coeffs, double lo, double hi);

double exact_value(NonLinear f, double x);

// Binds fitted coefficients to call sites and applies the numeric mode.
class Approximator {
 public:
  explicit Approximator(ApproxMode mode = ApproxMode::Chebyshev) : mode_(mode) {}

  ApproxMode mode() const { return mode_; }
  Ciphertext apply(Backend& be, const Ciphertext& x, const ApproxSpec& spec);
  Ciphertext sqrt(Backend& be, const Ciphertext& x, const ApproxSpec& spec);
  Ciphertext inv_sqrt(Backend& be, const Ciphertext& x, const ApproxSpec& spec);
  // x * inv_sqrt(x^2); spec bounds x
  Ciphertext sign(Backend& be, const Ciphertext& x, const ApproxSpec& spec);
  // the inverse square root part of sign, on a precomputed x^2
  Ciphertext sign_inv_sqrt(Backend& be, const Ciphertext& x2, const ApproxSpec& spec);

  // depth of apply() on a fresh input
  static int depth(const ApproxSpec& spec) { return poly_depth(spec.degree); }

 private:
  const std::vector<double>& coeffs(const ApproxSpec& spec);

  ApproxMode mode_;
  std::map<std::tuple<int, double, double, int>, std::vector<double>> cache_;
};

}  // namespace fedpca
