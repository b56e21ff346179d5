// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedpca/approx.hpp"
#include "fedpca/backend.hpp"
#include "fedpca/encmat.hpp"
#include "fedpca/enclinalg.hpp"
#include "fedpca/pca_params.hpp"

namespace fedpca {

struct DatasetShard {
  int party = 0;
  Mat A;  // n_i x m, cleartext at its owner
};

struct WorkflowState {
  Mat sketch;       // rho x n
  EncMatrix o;      // 1 x m column means
  EncMatrix P;      // rho x m
  std::vector<EncMatrix> G;      // Precomp: per-party centered covariance, m x m
  std::vector<EncMatrix> cache;  // Precomp: P x G_i, Seq: P x C_i^T, kept from Step 5 for Step 7
  EncMatrix Z;                   // rho x rho
  EigResult eig;
  EncMatrix eig_top;  // leading psi eigenvectors
  EncMatrix W;                   // psi x m
  std::vector<EncMatrix> Aprime_t;  // per party psi x n_i, the transposed projection

  Strategy strategy = Strategy::Precomp;  // resolved
  QrVariant variant = QrVariant::QR;
  LinalgSpecs specs;
  std::size_t n = 0, m = 0, n_max = 0;
};

// Step labels used in the cost ledgers.
inline const char* step_label(int step) {
  static const char* names[] = {"", "step1", "step2", "step3", "step4", "step5", "step6", "step7", "step8"};
  return names[step];
}
inline constexpr const char* kOutputStep = "output";

// Closed-form per-party communication of every step, in ciphertexts. A DQR run also counts the
// distributed factorization of each power iteration.
std::map<std::string, double> expected_comm(const PcaParams& params, std::size_t n, std::size_t m, std::size_t t,
                                            int lambda, QrVariant variant);

Strategy select_strategy(std::size_t m, std::size_t n_max, std::size_t rho, std::size_t t, const RuntimeProfile& prof);

class Workflow {
 public:
  Workflow(Backend& be, const std::vector<DatasetShard>& shards, PcaParams params, RuntimeProfile prof = {});

  void setup();
  void mean_vector();
  void random_projection();
  void power_iterations();
  void reduction();
  void eigendecomposition();
  void reconstruction();
  void projection();
  void run_all();

  const WorkflowState& state() const { return st_; }
  const PcaParams& params() const { return params_; }

 private:
  EncMatrix local_cov_product(std::size_t p, const EncMatrix& P);
  EncMatrix centered_right(std::size_t p, const EncMatrix& M);
  EncMatrix centered_left(std::size_t p, const EncMatrix& X);
  void orthogonalize_P(const EncMatrix& Y, bool first);

  Backend& be_;
  const std::vector<DatasetShard>& shards_;
  PcaParams params_;
  RuntimeProfile prof_;
  Approximator ap_;
  WorkflowState st_;
  std::vector<Mat> At_;  // A_i^T
};

struct PcaOutput {
  Mat W;                     // psi x m, collectively decrypted
  std::vector<Mat> Aprime;   // per party n_i x psi, decrypted by its owner
  Strategy strategy = Strategy::Precomp;
  QrVariant variant = QrVariant::QR;
  LinalgSpecs specs;
};

// Steps 1-8 followed by the release of W and of each party's projection.
PcaOutput run(Backend& be, const std::vector<DatasetShard>& shards, const PcaParams& params,
              const RuntimeProfile& prof = {});

}  // namespace fedpca
