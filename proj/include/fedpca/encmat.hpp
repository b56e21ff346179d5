// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedpca/backend.hpp"

namespace fedpca {

// Row i, block k holds columns [k*t, min((k+1)*t, cols)).
struct EncMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<Ciphertext>> data;

  std::size_t blocks() const { return data.empty() ? 0 : data.front().size(); }
  int level() const;
  bool pending() const;
};

EncMatrix encrypt_matrix(Backend& be, const Mat& m);
EncMatrix maintain(Backend& be, const EncMatrix& m);
EncMatrix equalize(Backend& be, const EncMatrix& m);
EncMatrix add(Backend& be, const EncMatrix& a, const EncMatrix& b);
EncMatrix sub(Backend& be, const EncMatrix& a, const EncMatrix& b);
EncMatrix mul_const(Backend& be, const EncMatrix& a, double c);
// rows [r0, r1) as a new matrix sharing ciphertexts
EncMatrix slice_rows(const EncMatrix& m, std::size_t r0, std::size_t r1);
// cleartext row vector split into slot blocks
std::vector<std::vector<double>> row_blocks(const Mat& m, Eigen::Index row, std::size_t t);

enum class Method { M1 = 1, M2 = 2, M3 = 3, M4 = 4, M5 = 5 };
enum class RightOperand { Plain, EncColumns, EncRows };

std::string method_name(Method m);

struct CostEstimate {
  std::uint64_t mults_cc = 0;
  std::uint64_t mults_pc = 0;
  std::uint64_t rots = 0;
  double weighted = 0;
  std::uint64_t mults() const { return mults_cc + mults_pc; }
};

// Closed-form cost lines. For M4 c is ignored; for M5 a = b = c = s.
CostEstimate cost_of(Method method, std::size_t a, std::size_t b, std::size_t c, std::size_t t,
                     const RuntimeProfile& prof, RightOperand right = RightOperand::Plain);
bool applicable(Method method, std::size_t a, std::size_t b, std::size_t c, std::size_t t,
                RightOperand right = RightOperand::Plain);
Method select_best(std::size_t a, std::size_t b, std::size_t c, std::size_t t, const RuntimeProfile& prof,
                   RightOperand right = RightOperand::Plain);
// weighted cost of the best applicable method
double zeta_star(std::size_t a, std::size_t b, std::size_t c, std::size_t t, const RuntimeProfile& prof,
                 RightOperand right = RightOperand::Plain);

EncMatrix mul_m1(Backend& be, const EncMatrix& M, const Mat& N);
// NT holds the columns of N as encrypted rows (c x b)
EncMatrix mul_m1(Backend& be, const EncMatrix& M, const EncMatrix& NT);
EncMatrix mul_m2(Backend& be, const EncMatrix& M, const Mat& N);
// N given as encrypted rows (b x c)
EncMatrix mul_m2(Backend& be, const EncMatrix& M, const EncMatrix& N);
EncMatrix mul_m3(Backend& be, const EncMatrix& M, const Mat& N);
// mu is a 1 x b encrypted row, one ciphertext per block
EncMatrix mul_m4(Backend& be, const EncMatrix& M, const std::vector<Ciphertext>& mu, int which_case);
EncMatrix mul_m5(Backend& be, const EncMatrix& M, const EncMatrix& N);
// M5 on row-major packed operands (stride s); result stays packed
Ciphertext mul_m5_packed(Backend& be, const Ciphertext& A, const Ciphertext& B, std::size_t s);

EncMatrix multiply(Backend& be, const EncMatrix& M, const Mat& N, Method method);
// adaptive: picks the cheapest applicable method for these dims
EncMatrix multiply(Backend& be, const EncMatrix& M, const Mat& N, const RuntimeProfile& prof);

// single-ciphertext packing used by M5
Ciphertext pack_square(Backend& be, const EncMatrix& M);
EncMatrix unpack_square(Backend& be, const Ciphertext& c, std::size_t s);

}  // namespace fedpca
