// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "fedpca/approx.hpp"
#include "fedpca/backend.hpp"
#include "fedpca/encmat.hpp"

namespace fedpca {

// The three nonlinear call sites of one Householder vector computation.
struct HHSpecs {
  ApproxSpec sqrt{NonLinear::Sqrt, 0.0, 4.0, 31};
  ApproxSpec sign{NonLinear::Sign, -2.0, 2.0, 31};
  ApproxSpec inv_sqrt{NonLinear::InvSqrt, 0.01, 16.0, 31};

  int degree() const;
  void validate() const;
};

// Interval groups. qr_first: the first power iteration; qr_rest: later iterations and the
// reconstruction. eigen_first: tridiagonalization; eigen_rest: the shifted QR iterations.
struct LinalgSpecs {
  HHSpecs qr_first, qr_rest, eigen_first, eigen_rest;
  ApproxSpec sort_sign{NonLinear::Sign, -4.0, 4.0, 31};

  // call-site name -> spec, e.g. "qr.first.sqrt", "eigen.sort.sign"
  std::map<std::string, ApproxSpec> by_site() const;
  void set_site(const std::string& site, const ApproxSpec& spec);
  void validate() const;
};

struct QrResult {
  EncMatrix Q;  // delta x h, orthonormal rows
  EncMatrix R;  // delta x delta, lower triangular
};

struct DqrResult {
  std::vector<EncMatrix> Q;  // column shards of Q, one per party
  EncMatrix R;
};

struct EigResult {
  EncMatrix Q;   // rows are eigenvectors
  Ciphertext l;  // eigenvalues in slots 0..eta-1, descending
};

enum class QrVariant { QR, DQR };
std::string qr_variant_name(QrVariant v);

// Householder vector for v (h reals in slots 0..h-1).
Ciphertext householder(Backend& be, Approximator& ap, const Ciphertext& v, std::size_t h, const HHSpecs& specs);

QrResult qr_t(Backend& be, Approximator& ap, const EncMatrix& V, const HHSpecs& first, const HHSpecs& rest);
// V split by columns: shard p is held by party p.
DqrResult dqr_t(Backend& be, Approximator& ap, const std::vector<EncMatrix>& shards, const HHSpecs& first,
                const HHSpecs& rest);
QrVariant choose_qr(std::size_t n_max, std::size_t m, double xi);

EigResult eigen(Backend& be, Approximator& ap, const EncMatrix& Z, std::size_t w, const LinalgSpecs& specs);

// Closed-form communication per party, in ciphertexts.
double hh_comm(std::size_t h, int degree, int lambda, std::size_t t);
double qr_comm(std::size_t delta, std::size_t h, int degree, int lambda, std::size_t t, QrVariant v = QrVariant::QR);
double eigen_comm(std::size_t eta, std::size_t w, int degree, int lambda, std::size_t t);

}  // namespace fedpca
