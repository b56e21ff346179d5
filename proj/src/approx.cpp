// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/approx.hpp"

#include <cmath>
#include <numbers>
#include <optional>

namespace fedpca {

std::string nonlinear_name(NonLinear f) {
  switch (f) {
    case NonLinear::Sign: return "sign";
    case NonLinear::Sqrt: return "sqrt";
    case NonLinear::InvSqrt: return "inv_sqrt";
  }
  return "?";
}

NonLinear parse_nonlinear(const std::string& s) {
  if (s == "sign") return NonLinear::Sign;
  if (s == "sqrt") return NonLinear::Sqrt;
  if (s == "inv_sqrt") return NonLinear::InvSqrt;
  throw ConfigError("unknown function id: " + s);
}

void ApproxSpec::validate() const {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("approximation interval needs lo < hi");
  if (degree < 1) throw ConfigError("approximation degree must be >= 1");
  if (fn == NonLinear::Sqrt && lo < 0) throw ConfigError("sqrt interval must satisfy lo >= 0");
  if (fn == NonLinear::InvSqrt && lo <= 0) throw ConfigError("inv_sqrt interval must satisfy lo > 0");
  if (min_magnitude < 0) throw ConfigError("min_magnitude must be >= 0");
}

std::pair<double, double> ApproxSpec::sign_square_interval() const {
  double m = std::max(std::abs(lo), std::abs(hi));
  double floor = min_magnitude > 0 ? std::min(min_magnitude, m) : 0.1 * m;
  return {floor * floor, m * m};
}

double exact_value(NonLinear f, double x) {
  switch (f) {
    case NonLinear::Sqrt: return x > 0 ? std::sqrt(x) : 0.0;
    case NonLinear::InvSqrt: return x > 0 ? 1.0 / std::sqrt(x) : 0.0;
    case NonLinear::Sign: return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
  }
  return 0;
}

std::vector<double> chebyshev_fit(const std::function<double(double)>& f, double lo, double hi, int degree) {
  if (!(lo < hi)) throw ConfigError("chebyshev_fit needs lo < hi");
  if (degree < 0) throw ConfigError("chebyshev_fit needs degree >= 0");
  const int n = degree + 1;
  std::vector<double> fx(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double node = std::cos(std::numbers::pi * (k + 0.5) / n);
    fx[static_cast<std::size_t>(k)] = f(0.5 * (node + 1) * (hi - lo) + lo);
  }
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += fx[static_cast<std::size_t>(k)] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
    c[static_cast<std::size_t>(j)] = 2.0 * s / n;
  }
  c[0] *= 0.5;
  return c;
}

double clenshaw(const std::vector<double>& coeffs, double lo, double hi, double x) {
  if (coeffs.empty()) return 0;
  double y = (2 * x - lo - hi) / (hi - lo);
  double b1 = 0, b2 = 0;
  for (std::size_t k = coeffs.size(); k-- > 1;) {
    double b0 = 2 * y * b1 - b2 + coeffs[k];
    b2 = b1;
    b1 = b0;
  }
  return y * b1 - b2 + coeffs[0];
}

int poly_depth(int degree) { return degree <= 0 ? 0 : ceil_log2(static_cast<std::size_t>(degree)) + 1; }

double poly_mult_bound(int degree) {
  return 2 * std::sqrt(2.0 * degree) + 0.5 * std::log2(static_cast<double>(degree)) + 4;
}

namespace {

int degree_of(const std::vector<double>& c) {
  int d = static_cast<int>(c.size()) - 1;
  while (d > 0 && c[static_cast<std::size_t>(d)] == 0) --d;
  return d;
}

class BsgsEvaluator {
 public:
  BsgsEvaluator(Backend& be, const Ciphertext& y, int degree) : be_(be) {
    const int M = ceil_log2(static_cast<std::size_t>(degree) + 1);
    baby_ = std::size_t{1} << ((M + 1) / 2);
    const std::size_t top = std::min<std::size_t>(baby_ - 1, static_cast<std::size_t>(degree));
    T_.resize(top + 1);
    T_[1] = y;
    for (std::size_t i = 2; i <= top; ++i) {
      if (i % 2 == 0) {
        T_[i] = doubled(T_[i / 2]);
      } else {
        auto p = be_.maintain(be_.mul_cipher(T_[(i + 1) / 2], T_[i / 2]));
        T_[i] = be_.sub(be_.mul_const(p, 2.0), T_[1]);
      }
    }
    if (static_cast<std::size_t>(degree) >= baby_) {
      Ciphertext g = doubled(T_[baby_ / 2]);
      for (std::size_t P = baby_; P <= static_cast<std::size_t>(degree); P *= 2) {
        giant_[P] = g;
        if (2 * P <= static_cast<std::size_t>(degree)) g = doubled(g);
      }
    }
  }

  Ciphertext eval(const std::vector<double>& c) {
    const int deg = degree_of(c);
    if (static_cast<std::size_t>(deg) < baby_) {
      std::optional<Ciphertext> acc;
      for (int i = 1; i <= deg; ++i) {
        double ci = c[static_cast<std::size_t>(i)];
        if (ci == 0) continue;
        auto term = be_.mul_const(T_[static_cast<std::size_t>(i)], ci);
        acc = acc ? be_.add(*acc, term) : term;
      }
      if (!acc) acc = be_.mul_const(T_[1], 0.0);
      return be_.add_const(*acc, c[0]);
    }
    std::size_t P = std::size_t{1} << (std::bit_width(static_cast<std::size_t>(deg)) - 1);
    auto d = static_cast<std::size_t>(deg);
    std::vector<double> q(d - P + 1), r(c.begin(), c.begin() + static_cast<long>(P));
    q[0] = c[P];
    for (std::size_t i = 1; i + P <= d; ++i) {
      q[i] = 2 * c[P + i];
      r[P - i] -= c[P + i];
    }
    const Ciphertext& G = giant_.at(P);
    Ciphertext prod = degree_of(q) == 0 ? be_.mul_const(G, q[0]) : be_.maintain(be_.mul_cipher(eval(q), G));
    return be_.add(prod, eval(r));
  }

 private:
  Ciphertext doubled(const Ciphertext& a) {
    auto sq = be_.maintain(be_.mul_cipher(a, a));
    return be_.add_const(be_.mul_const(sq, 2.0), -1.0);
  }

  Backend& be_;
  std::size_t baby_;
  std::vector<Ciphertext> T_;
  std::map<std::size_t, Ciphertext> giant_;
};

}  // namespace

Ciphertext eval_poly_bsgs(Backend& be, const Ciphertext& x, const std::vector<double>& coeffs, double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("evaluation interval needs lo < hi");
  if (coeffs.empty()) return be.mul_const(x, 0.0);
  const int deg = degree_of(coeffs);
  if (deg == 0) return be.add_const(be.mul_const(x, 0.0), coeffs[0]);
  if (x.level() < poly_depth(deg)) throw LevelError("not enough levels for polynomial evaluation");
  std::vector<double> scale(be.slots(), 2.0 / (hi - lo));
  Ciphertext y = be.add_const(be.maintain(be.mul_plain(x, scale)), -(hi + lo) / (hi - lo));
  if (deg == 1) return be.add_const(be.mul_const(y, coeffs[1]), coeffs[0]);
  BsgsEvaluator ev(be, y, deg);
  std::vector<double> c(coeffs.begin(), coeffs.begin() + deg + 1);
  return ev.eval(c);
}

const std::vector<double>& Approximator::coeffs(const ApproxSpec& spec) {
  auto key = std::make_tuple(static_cast<int>(spec.fn), spec.lo, spec.hi, spec.degree);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  NonLinear fn = spec.fn;
  auto f = [fn](double x) { return exact_value(fn, x); };
  return cache_.emplace(key, chebyshev_fit(f, spec.lo, spec.hi, spec.degree)).first->second;
}

Ciphertext Approximator::apply(Backend& be, const Ciphertext& x, const ApproxSpec& spec) {
  spec.validate();
  if (spec.fn == NonLinear::Sign) return sign(be, x, spec);
  Ciphertext traced = eval_poly_bsgs(be, x, coeffs(spec), spec.lo, spec.hi);
  if (mode_ == ApproxMode::Chebyshev) return traced;
  NonLinear fn = spec.fn;
  return be.overridden(traced, x, [fn](double v) { return exact_value(fn, v); });
}

Ciphertext Approximator::sqrt(Backend& be, const Ciphertext& x, const ApproxSpec& spec) {
  ApproxSpec s = spec;
  s.fn = NonLinear::Sqrt;
  return apply(be, x, s);
}

Ciphertext Approximator::inv_sqrt(Backend& be, const Ciphertext& x, const ApproxSpec& spec) {
  ApproxSpec s = spec;
  s.fn = NonLinear::InvSqrt;
  return apply(be, x, s);
}

Ciphertext Approximator::sign_inv_sqrt(Backend& be, const Ciphertext& x2, const ApproxSpec& spec) {
  auto [lo, hi] = spec.sign_square_interval();
  ApproxSpec s{NonLinear::InvSqrt, lo, hi, spec.degree, 0};
  return apply(be, x2, s);
}

Ciphertext Approximator::sign(Backend& be, const Ciphertext& x, const ApproxSpec& spec) {
  spec.validate();
  Ciphertext x2 = be.maintain(be.mul_cipher(x, x));
  Ciphertext inv = sign_inv_sqrt(be, x2, spec);
  return be.maintain(be.mul_cipher(be.drop_to(x, std::min(x.level(), inv.level())), inv));
}

}  // namespace fedpca
