// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/encmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

namespace fedpca {

namespace {

std::size_t ceil_sqrt(std::size_t x) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(x)));
  while (r * r < x) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= x) --r;
  return r;
}

void accumulate(Backend& be, std::optional<Ciphertext>& acc, const Ciphertext& c) {
  acc = acc ? be.add(*acc, c) : c;
}

EncMatrix shaped(std::size_t rows, std::size_t cols, std::size_t t) {
  EncMatrix r;
  r.rows = rows;
  r.cols = cols;
  r.data.assign(rows, std::vector<Ciphertext>(ceil_div(std::max<std::size_t>(cols, 1), t)));
  return r;
}

std::vector<double> column_block(const Mat& N, std::size_t j, std::size_t k, std::size_t t) {
  auto b = static_cast<std::size_t>(N.rows());
  std::size_t lo = k * t, hi = std::min(b, lo + t);
  std::vector<double> v(hi - lo);
  for (std::size_t u = lo; u < hi; ++u) v[u - lo] = N(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(j));
  return v;
}

std::vector<double> row_block(const Mat& N, std::size_t j, std::size_t q, std::size_t t) {
  auto c = static_cast<std::size_t>(N.cols());
  std::size_t lo = q * t, hi = std::min(c, lo + t);
  std::vector<double> v(hi - lo);
  for (std::size_t u = lo; u < hi; ++u) v[u - lo] = N(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(u));
  return v;
}

void check_inner(std::size_t b1, std::size_t b2) {
  if (b1 != b2) throw ShapeError("inner dimensions do not agree");
}

// M3 geometry: baby step B, giant count G, covered length of the periodic row
struct M3Plan {
  std::size_t B, G, need, ext_len;
};

M3Plan m3_plan(std::size_t b, std::size_t c) {
  M3Plan p{};
  p.B = ceil_sqrt(b);
  p.G = ceil_div(b, p.B);
  p.need = p.G * p.B + c - 1;
  p.ext_len = b;
  while (p.ext_len < p.need) p.ext_len *= 2;
  return p;
}

}  // namespace

int EncMatrix::level() const {
  int lv = std::numeric_limits<int>::max();
  for (const auto& row : data)
    for (const auto& c : row) lv = std::min(lv, c.level());
  return lv;
}

bool EncMatrix::pending() const {
  for (const auto& row : data)
    for (const auto& c : row)
      if (c.pending()) return true;
  return false;
}

std::vector<std::vector<double>> row_blocks(const Mat& m, Eigen::Index row, std::size_t t) {
  auto cols = static_cast<std::size_t>(m.cols());
  std::vector<std::vector<double>> out;
  for (std::size_t q = 0; q < ceil_div(std::max<std::size_t>(cols, 1), t); ++q)
    out.push_back(row_block(m, static_cast<std::size_t>(row), q, t));
  return out;
}

EncMatrix encrypt_matrix(Backend& be, const Mat& m) {
  const std::size_t t = be.slots();
  EncMatrix r = shaped(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), t);
  for (std::size_t i = 0; i < r.rows; ++i) {
    auto blocks = row_blocks(m, static_cast<Eigen::Index>(i), t);
    for (std::size_t q = 0; q < blocks.size(); ++q) r.data[i][q] = be.encrypt(blocks[q]);
  }
  return r;
}

EncMatrix maintain(Backend& be, const EncMatrix& m) {
  EncMatrix r = m;
  for (auto& row : r.data)
    for (auto& c : row) c = be.maintain(c);
  return r;
}

EncMatrix equalize(Backend& be, const EncMatrix& m) {
  if (m.data.empty()) return m;
  int lv = m.level();
  EncMatrix r = m;
  for (auto& row : r.data)
    for (auto& c : row) c = be.drop_to(c, lv);
  return r;
}

EncMatrix add(Backend& be, const EncMatrix& a, const EncMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw ShapeError("matrix add shape mismatch");
  EncMatrix r = a;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t q = 0; q < a.blocks(); ++q) r.data[i][q] = be.add(a.data[i][q], b.data[i][q]);
  return r;
}

EncMatrix sub(Backend& be, const EncMatrix& a, const EncMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw ShapeError("matrix sub shape mismatch");
  EncMatrix r = a;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t q = 0; q < a.blocks(); ++q) r.data[i][q] = be.sub(a.data[i][q], b.data[i][q]);
  return r;
}

EncMatrix mul_const(Backend& be, const EncMatrix& a, double c) {
  EncMatrix r = a;
  for (auto& row : r.data)
    for (auto& x : row) x = be.mul_const(x, c);
  return r;
}

EncMatrix slice_rows(const EncMatrix& m, std::size_t r0, std::size_t r1) {
  if (r0 > r1 || r1 > m.rows) throw ShapeError("row slice out of range");
  EncMatrix r;
  r.rows = r1 - r0;
  r.cols = m.cols;
  r.data.assign(m.data.begin() + static_cast<long>(r0), m.data.begin() + static_cast<long>(r1));
  return r;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::M1: return "M1";
    case Method::M2: return "M2";
    case Method::M3: return "M3";
    case Method::M4: return "M4";
    case Method::M5: return "M5";
  }
  return "?";
}

CostEstimate cost_of(Method method, std::size_t a, std::size_t b, std::size_t c, std::size_t t,
                     const RuntimeProfile& prof, RightOperand right) {
  if (a == 0 || b == 0 || c == 0) throw ShapeError("dimensions must be positive");
  const std::uint64_t bb = ceil_div(b, t);
  const auto logt = static_cast<std::uint64_t>(exact_log2(t));
  CostEstimate e;
  switch (method) {
    case Method::M1:
      if (right == RightOperand::EncColumns) {
        e.mults_cc = bb * a * c;
        e.mults_pc = a * c;
      } else {
        e.mults_pc = (bb + 1) * a * c;
      }
      e.rots = a * c * bb * logt;
      break;
    case Method::M2:
      (right == RightOperand::EncRows ? e.mults_cc : e.mults_pc) = bb * a * b;
      e.rots = a * b * static_cast<std::uint64_t>(ceil_log2(std::min(c, t)));
      break;
    case Method::M3:
      e.mults_pc = bb * a * b;
      e.rots = bb * (ceil_div(c, b) + 2 * a * ceil_sqrt(b));
      break;
    case Method::M4:
      e.mults_cc = bb * a;
      e.rots = bb * 2 * a * static_cast<std::uint64_t>(ceil_log2(std::min(b, t)));
      break;
    case Method::M5:
      e.mults_cc = a;
      e.mults_pc = 4 * a;
      e.rots = 3 * a + 5 * ceil_sqrt(a);
      break;
  }
  e.weighted = prof.mult_cc * static_cast<double>(e.mults_cc) + prof.mult_pc * static_cast<double>(e.mults_pc) +
               prof.rotate * static_cast<double>(e.rots);
  return e;
}

bool applicable(Method method, std::size_t a, std::size_t b, std::size_t c, std::size_t t, RightOperand right) {
  (void)a;
  switch (method) {
    case Method::M1: return right != RightOperand::EncRows;
    case Method::M2: return right != RightOperand::EncColumns;
    case Method::M3: {
      if (right != RightOperand::Plain || b > t || c > t) return false;
      return m3_plan(b, c).ext_len <= t || t % b == 0;
    }
    case Method::M4:
    case Method::M5: return false;
  }
  return false;
}

Method select_best(std::size_t a, std::size_t b, std::size_t c, std::size_t t, const RuntimeProfile& prof,
                   RightOperand right) {
  Method best = Method::M1;
  double best_w = std::numeric_limits<double>::infinity();
  for (Method m : {Method::M1, Method::M2, Method::M3}) {
    if (!applicable(m, a, b, c, t, right)) continue;
    double w = cost_of(m, a, b, c, t, prof, right).weighted;
    if (w < best_w) {
      best_w = w;
      best = m;
    }
  }
  return best;
}

double zeta_star(std::size_t a, std::size_t b, std::size_t c, std::size_t t, const RuntimeProfile& prof,
                 RightOperand right) {
  return cost_of(select_best(a, b, c, t, prof, right), a, b, c, t, prof, right).weighted;
}

EncMatrix mul_m1(Backend& be, const EncMatrix& M, const Mat& N) {
  check_inner(M.cols, static_cast<std::size_t>(N.rows()));
  const std::size_t t = be.slots(), c = static_cast<std::size_t>(N.cols());
  EncMatrix R = shaped(M.rows, c, t);
  std::vector<std::vector<std::optional<Ciphertext>>> acc(M.rows, std::vector<std::optional<Ciphertext>>(R.blocks()));
  for (std::size_t j = 0; j < c; ++j) {
    std::vector<std::vector<double>> col(M.blocks());
    for (std::size_t k = 0; k < M.blocks(); ++k) col[k] = column_block(N, j, k, t);
    auto mask = be.onehot(j % t);
    for (std::size_t i = 0; i < M.rows; ++i) {
      std::optional<Ciphertext> s;
      for (std::size_t k = 0; k < M.blocks(); ++k) accumulate(be, s, be.sum_all(be.mul_plain(M.data[i][k], col[k])));
      accumulate(be, acc[i][j / t], be.mul_plain(be.maintain(*s), mask));
    }
  }
  for (std::size_t i = 0; i < M.rows; ++i)
    for (std::size_t q = 0; q < R.blocks(); ++q) R.data[i][q] = be.maintain(*acc[i][q]);
  return equalize(be, R);
}

EncMatrix mul_m1(Backend& be, const EncMatrix& M, const EncMatrix& NT) {
  check_inner(M.cols, NT.cols);
  const std::size_t t = be.slots(), c = NT.rows;
  EncMatrix R = shaped(M.rows, c, t);
  std::vector<std::vector<std::optional<Ciphertext>>> acc(M.rows, std::vector<std::optional<Ciphertext>>(R.blocks()));
  for (std::size_t j = 0; j < c; ++j) {
    auto mask = be.onehot(j % t);
    for (std::size_t i = 0; i < M.rows; ++i) {
      std::optional<Ciphertext> s;
      for (std::size_t k = 0; k < M.blocks(); ++k)
        accumulate(be, s, be.sum_all(be.mul_cipher(M.data[i][k], NT.data[j][k])));
      accumulate(be, acc[i][j / t], be.mul_plain(be.maintain(*s), mask));
    }
  }
  for (std::size_t i = 0; i < M.rows; ++i)
    for (std::size_t q = 0; q < R.blocks(); ++q) R.data[i][q] = be.maintain(*acc[i][q]);
  return equalize(be, R);
}

namespace {

// M[i, j] moved to slot 0; the mask and the shift are extraction overhead
Ciphertext extract(Backend& be, const EncMatrix& M, std::size_t i, std::size_t j) {
  const std::size_t t = be.slots();
  OverheadScope ov(be);
  Ciphertext e = be.maintain(be.mul_plain(M.data[i][j / t], be.onehot(j % t)));
  return be.rotate(e, static_cast<long>(j % t));
}

}  // namespace

EncMatrix mul_m2(Backend& be, const EncMatrix& M, const Mat& N) {
  check_inner(M.cols, static_cast<std::size_t>(N.rows()));
  const std::size_t t = be.slots(), b = M.cols, c = static_cast<std::size_t>(N.cols());
  EncMatrix R = shaped(M.rows, c, t);
  for (std::size_t i = 0; i < M.rows; ++i) {
    std::vector<std::optional<Ciphertext>> acc(R.blocks());
    for (std::size_t j = 0; j < b; ++j) {
      Ciphertext d = be.dup(extract(be, M, i, j), std::min(c, t));
      for (std::size_t q = 0; q < R.blocks(); ++q) accumulate(be, acc[q], be.mul_plain(d, row_block(N, j, q, t)));
    }
    for (std::size_t q = 0; q < R.blocks(); ++q) R.data[i][q] = be.maintain(*acc[q]);
  }
  return equalize(be, R);
}

EncMatrix mul_m2(Backend& be, const EncMatrix& M, const EncMatrix& N) {
  check_inner(M.cols, N.rows);
  const std::size_t t = be.slots(), b = M.cols, c = N.cols;
  EncMatrix R = shaped(M.rows, c, t);
  for (std::size_t i = 0; i < M.rows; ++i) {
    std::vector<std::optional<Ciphertext>> acc(R.blocks());
    for (std::size_t j = 0; j < b; ++j) {
      Ciphertext d = be.dup(extract(be, M, i, j), std::min(c, t));
      for (std::size_t q = 0; q < R.blocks(); ++q) accumulate(be, acc[q], be.mul_cipher(d, N.data[j][q]));
    }
    for (std::size_t q = 0; q < R.blocks(); ++q) R.data[i][q] = be.maintain(*acc[q]);
  }
  return equalize(be, R);
}

EncMatrix mul_m3(Backend& be, const EncMatrix& M, const Mat& N) {
  check_inner(M.cols, static_cast<std::size_t>(N.rows()));
  const std::size_t t = be.slots(), a = M.rows, b = M.cols, c = static_cast<std::size_t>(N.cols());
  if (!applicable(Method::M3, a, b, c, t)) throw CapacityError("M3 is not applicable to these dimensions");
  const M3Plan plan = m3_plan(b, c);
  const std::size_t B = plan.B, G = plan.G;
  const bool fill_all = plan.ext_len > t;

  // rows repeated with period b until the diagonals can read them
  std::vector<Ciphertext> ext(a);
  for (std::size_t i = 0; i < a; ++i) {
    Ciphertext x = M.data[i][0];
    std::size_t len = b;
    const std::size_t target = fill_all ? t : plan.need;
    while (len < target) {
      x = be.add(x, be.rotate(x, -static_cast<long>(len)));
      len *= 2;
    }
    ext[i] = x;
  }

  std::vector<std::vector<std::optional<Ciphertext>>> inner(a, std::vector<std::optional<Ciphertext>>(G));
  std::vector<Ciphertext> baby = ext;
  for (std::size_t y = 0; y < B; ++y) {
    if (y > 0)
      for (std::size_t i = 0; i < a; ++i) baby[i] = be.rotate(baby[i], 1);
    for (std::size_t g = 0; g < G; ++g) {
      if (g * B + y >= b) continue;
      std::vector<double> diag(t, 0.0);
      for (std::size_t j = 0; j < c; ++j) {
        std::size_t s = (g * B + j) % t;
        std::size_t row = (j + g * B + y) % b;
        diag[s] = N(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j));
      }
      for (std::size_t i = 0; i < a; ++i) accumulate(be, inner[i][g], be.mul_plain(baby[i], diag));
    }
  }

  EncMatrix R = shaped(a, c, t);
  for (std::size_t i = 0; i < a; ++i) {
    Ciphertext acc = *inner[i][G - 1];
    for (std::size_t g = G - 1; g-- > 0;) acc = be.add(be.rotate(acc, static_cast<long>(B)), *inner[i][g]);
    R.data[i][0] = be.maintain(acc);
  }
  return equalize(be, R);
}

EncMatrix mul_m4(Backend& be, const EncMatrix& M, const std::vector<Ciphertext>& mu, int which_case) {
  if (which_case != 1 && which_case != 2) throw ConfigError("M4 case must be 1 or 2");
  if (mu.size() != M.blocks()) throw ShapeError("M4 vector block count mismatch");
  const std::size_t t = be.slots(), b = M.cols;
  const int L = ceil_log2(b);
  const bool windowed = b < t && b + (std::size_t{1} << L) <= t;
  EncMatrix R = shaped(M.rows, b, t);

  for (std::size_t i = 0; i < M.rows; ++i) {
    if (windowed) {
      Ciphertext x = M.data[i][0];
      if (which_case == 2) x = be.maintain(be.mul_cipher(x, mu[0]));
      // left and right prefix ladders overlap only in x itself
      Ciphertext S = x, P = x;
      for (int k = 0; k < L; ++k) {
        S = be.add(S, be.rotate(S, 1L << k));
        P = be.add(P, be.rotate(P, -(1L << k)));
      }
      Ciphertext tot = be.sub(be.add(S, P), x);
      if (which_case == 1) {
        R.data[i][0] = be.maintain(be.mul_cipher(tot, mu[0]));
      } else {
        OverheadScope ov(be);
        R.data[i][0] = be.maintain(be.mul_plain(tot, be.window(0, b)));
      }
      continue;
    }
    std::optional<Ciphertext> x;
    for (std::size_t k = 0; k < M.blocks(); ++k) {
      Ciphertext blk = M.data[i][k];
      if (which_case == 2) blk = be.mul_cipher(blk, mu[k]);
      accumulate(be, x, blk);
    }
    Ciphertext tot = be.sum_all(be.maintain(*x));
    for (std::size_t k = 0; k < M.blocks(); ++k) {
      std::size_t width = std::min(t, b - k * t);
      if (which_case == 1) {
        R.data[i][k] = be.maintain(be.mul_cipher(tot, mu[k]));
      } else {
        OverheadScope ov(be);
        R.data[i][k] = be.maintain(be.mul_plain(tot, be.window(0, width)));
      }
    }
  }
  return equalize(be, R);
}

Ciphertext pack_square(Backend& be, const EncMatrix& M) {
  const std::size_t s = M.rows;
  if (M.cols != s) throw ShapeError("packing needs a square matrix");
  if (s * s > be.slots()) throw CapacityError("s*s exceeds the slot count");
  Ciphertext acc = M.data[0][0];
  for (std::size_t i = 1; i < s; ++i) acc = be.add(acc, be.rotate(M.data[i][0], -static_cast<long>(i * s)));
  return acc;
}

EncMatrix unpack_square(Backend& be, const Ciphertext& c, std::size_t s) {
  EncMatrix R = shaped(s, s, be.slots());
  for (std::size_t i = 0; i < s; ++i) {
    Ciphertext r = be.maintain(be.mul_plain(c, be.window(i * s, (i + 1) * s)));
    R.data[i][0] = be.rotate(r, static_cast<long>(i * s));
  }
  return R;
}

namespace {

// out = sum_k mask_k * Rot_k(x), evaluated baby-step giant-step with one deferred rescale
Ciphertext linear_transform(Backend& be, const Ciphertext& x, const std::map<long, std::vector<double>>& diags) {
  const std::size_t t = be.slots();
  const long kmin = diags.begin()->first, kmax = diags.rbegin()->first;
  const auto span = static_cast<std::size_t>(kmax - kmin + 1);
  const auto B = static_cast<long>(ceil_sqrt(span));
  const long G = static_cast<long>(ceil_div(span, static_cast<std::size_t>(B)));
  std::vector<Ciphertext> baby(static_cast<std::size_t>(B));
  baby[0] = x;
  for (long y = 1; y < B; ++y) baby[static_cast<std::size_t>(y)] = be.rotate(baby[static_cast<std::size_t>(y - 1)], 1);
  auto T = static_cast<long>(t);
  std::optional<Ciphertext> out;
  for (long g = 0; g < G; ++g) {
    const long shift = kmin + g * B;
    std::optional<Ciphertext> inner;
    for (long y = 0; y < B; ++y) {
      auto it = diags.find(shift + y);
      if (it == diags.end()) continue;
      // pre-rotate the mask so the giant rotation lands it in place
      std::vector<double> m(t, 0.0);
      for (long l = 0; l < T; ++l) m[static_cast<std::size_t>(((l + shift) % T + T) % T)] = it->second[static_cast<std::size_t>(l)];
      accumulate(be, inner, be.mul_plain(baby[static_cast<std::size_t>(y)], m));
    }
    if (!inner) continue;
    accumulate(be, out, be.rotate(*inner, shift));
  }
  return be.maintain(*out);
}

}  // namespace

Ciphertext mul_m5_packed(Backend& be, const Ciphertext& A, const Ciphertext& Bp, std::size_t s) {
  const std::size_t t = be.slots();
  if (s == 0 || s * s > t) throw CapacityError("M5 needs s*s <= t");
  const std::size_t ss = s * s;
  const bool replicate = ss != t;
  if (replicate && 2 * ss > t) throw CapacityError("M5 needs 2*s*s <= t or s*s == t");
  auto sl = static_cast<long>(s);

  std::map<long, std::vector<double>> sig, tau;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      std::size_t l = i * s + j;
      long k = static_cast<long>((i + j) % s) - static_cast<long>(j);
      auto& u = sig[k];
      if (u.empty()) u.assign(t, 0.0);
      u[l] = 1.0;
      long k2 = (static_cast<long>((i + j) % s) - static_cast<long>(i)) * sl;
      auto& v = tau[k2];
      if (v.empty()) v.assign(t, 0.0);
      v[l] = 1.0;
    }
  Ciphertext sA = linear_transform(be, A, sig);
  Ciphertext tB = linear_transform(be, Bp, tau);
  if (replicate) tB = be.add(tB, be.rotate(tB, -static_cast<long>(ss)));

  std::optional<Ciphertext> acc;
  for (std::size_t k = 0; k < s; ++k) {
    Ciphertext phi = sA;
    if (k > 0) {
      std::vector<double> v(t, 0.0), w(t, 0.0);
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) (j + k < s ? v : w)[i * s + j] = 1.0;
      auto kl = static_cast<long>(k);
      phi = be.maintain(be.add(be.mul_plain(be.rotate(sA, kl), v), be.mul_plain(be.rotate(sA, kl - sl), w)));
    }
    Ciphertext psi = k > 0 ? be.rotate(tB, static_cast<long>(k * s)) : tB;
    accumulate(be, acc, be.mul_cipher(phi, psi));
  }
  return be.maintain(*acc);
}

EncMatrix mul_m5(Backend& be, const EncMatrix& M, const EncMatrix& N) {
  const std::size_t s = M.rows;
  if (M.cols != s || N.rows != s || N.cols != s) throw ShapeError("M5 needs two s x s matrices");
  if (s * s > be.slots()) throw CapacityError("M5 needs s*s <= t");
  Ciphertext out = mul_m5_packed(be, pack_square(be, M), pack_square(be, N), s);
  return equalize(be, unpack_square(be, out, s));
}

EncMatrix multiply(Backend& be, const EncMatrix& M, const Mat& N, Method method) {
  switch (method) {
    case Method::M1: return mul_m1(be, M, N);
    case Method::M2: return mul_m2(be, M, N);
    case Method::M3: return mul_m3(be, M, N);
    default: throw ConfigError("method not usable for encrypted x cleartext products");
  }
}

EncMatrix multiply(Backend& be, const EncMatrix& M, const Mat& N, const RuntimeProfile& prof) {
  return multiply(be, M, N, select_best(M.rows, M.cols, static_cast<std::size_t>(N.cols()), be.slots(), prof));
}

}  // namespace fedpca
