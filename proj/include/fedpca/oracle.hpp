// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "fedpca/common.hpp"
#include "fedpca/enclinalg.hpp"
#include "fedpca/pca_params.hpp"

namespace fedpca {

// Observed [min, max] of the inputs reaching each nonlinear call site.
class RangeRecorder {
 public:
  void record(const std::string& site, double x);
  bool has(const std::string& site) const { return ranges_.count(site) > 0; }
  std::pair<double, double> range(const std::string& site) const { return ranges_.at(site); }
  // smallest nonzero magnitude seen at a sign site
  double min_magnitude(const std::string& site) const;
  const std::map<std::string, std::pair<double, double>>& all() const { return ranges_; }

 private:
  std::map<std::string, std::pair<double, double>> ranges_;
  std::map<std::string, double> min_mag_;
};

// Specs whose intervals cover the recorded ranges widened by a safety factor.
LinalgSpecs fit_intervals(const RangeRecorder& rec, const LinalgSpecs& base, double factor);

struct ClearQr {
  Mat Q;  // delta x h
  Mat R;  // delta x delta, lower triangular
};

struct ClearEig {
  Vec l;  // descending
  Mat Q;  // rows are eigenvectors
};

// Householder vector of x with pivot c; entries before c are ignored.
Vec householder_clear(const Vec& x, std::size_t c, RangeRecorder* rec = nullptr, const std::string& group = "");
// V = R * Q over rows, same reflections and sign convention as the encrypted routine.
ClearQr qr_rows(const Mat& V, RangeRecorder* rec = nullptr, const std::string& first = "qr.first",
                const std::string& rest = "qr.rest");
// Tridiagonalization, shifted QR iterations and the sorting network, as run under encryption.
ClearEig eigen_iterative(const Mat& Z, std::size_t w, RangeRecorder* rec = nullptr);
// Cyclic Jacobi to machine precision, descending.
ClearEig eig_bruteforce(const Mat& Z);

struct RpcaPath {
  Strategy strategy = Strategy::Precomp;  // resolved
  QrVariant variant = QrVariant::QR;
};

struct RpcaOutput {
  Mat W;       // psi x m
  Mat Aprime;  // n x psi
  Vec mean;
  Mat Z;
  ClearEig eig;
};

RpcaOutput rpca_cleartext(const Mat& A, const PcaParams& params, const RpcaPath& path, RangeRecorder* rec = nullptr);
// Top-psi right singular vectors of the centered data, descending.
Mat pca_exact(const Mat& A, std::size_t psi);
Mat meta_analysis(const std::vector<Mat>& shards, std::size_t psi, std::size_t local_rank);

struct Metrics {
  double mse = 0;
  std::vector<double> r2;  // per aligned component
  double r2_mean = 0;
  std::vector<double> principal_angles;
};

Metrics compare(const Mat& Wa, const Mat& Wb);
// flips each row so its largest-magnitude entry is positive
Mat sign_normalized(const Mat& W);

}  // namespace fedpca
