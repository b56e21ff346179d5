// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "fedpca/collective.hpp"
#include "fedpca/fedsim.hpp"
#include "fedpca/oracle.hpp"
#include "fedpca/pca_flow.hpp"
#include "test_util.hpp"

namespace fedpca {
namespace {

std::vector<DatasetShard> split(const Mat& A, const std::vector<Eigen::Index>& sizes) {
  std::vector<DatasetShard> out;
  Eigen::Index r = 0;
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    out.push_back({static_cast<int>(p), A.middleRows(r, sizes[p])});
    r += sizes[p];
  }
  return out;
}

PcaParams exact_params(Strategy s) {
  PcaParams p;
  p.p = 3;
  p.w = 5;
  p.psi = 2;
  p.alpha = 2;
  p.strategy = s;
  p.approx = ApproxMode::Exact;
  p.sketch_seed = 7;
  return p;
}

CryptoParams crypto(std::size_t t = 64) {
  CryptoParams c;
  c.ring_degree = 2 * t;
  c.level_budget = 7;
  return c;
}

TEST(Flow, ShadowsOracle) {
  std::mt19937_64 rng(3);
  Mat A = testing::random_mat(rng, 40, 12) * 2.0;
  for (Strategy s : {Strategy::Precomp, Strategy::Seq}) {
    Backend be(crypto(), 3);
    auto shards = split(A, {15, 13, 12});
    auto out = run(be, shards, exact_params(s));
    auto ref = rpca_cleartext(A, exact_params(s), {s, out.variant});
    EXPECT_LE((out.W - ref.W).cwiseAbs().maxCoeff(), 1e-9) << strategy_name(s);
    Mat Ap(40, 2);
    Ap << out.Aprime[0], out.Aprime[1], out.Aprime[2];
    EXPECT_LE((Ap - ref.Aprime).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Flow, SketchIsCountSketch) {
  Mat S = count_sketch(8, 6144, 5);
  EXPECT_EQ(S.rows(), 8);
  EXPECT_EQ(S.cols(), 6144);
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    int nz = 0;
    for (Eigen::Index i = 0; i < 8; ++i)
      if (S(i, j) != 0) {
        ++nz;
        EXPECT_EQ(std::abs(S(i, j)), 1.0);
      }
    EXPECT_EQ(nz, 1);
  }
  EXPECT_EQ(S, count_sketch(8, 6144, 5));
  EXPECT_NE(S, count_sketch(8, 6144, 6));
  // every row is used on a sketch this wide
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_GT(S.row(i).cwiseAbs().sum(), 0);
}

TEST(Flow, RejectsTooManyComponents) {
  PcaParams p;
  p.psi = 4;
  p.alpha = 4;
  EXPECT_THROW(p.validate(100, 7), ConfigError);
  EXPECT_THROW(p.validate(7, 100), ConfigError);
  EXPECT_NO_THROW(p.validate(8, 8));
}

TEST(Flow, MeanOfTwoRows) {
  Mat A(2, 2);
  A << 1, 2, 3, 4;
  auto shards = split(A, {1, 1});
  PcaParams p = exact_params(Strategy::Precomp);
  p.psi = 1;
  p.alpha = 1;
  Backend be(crypto(), 2);
  Workflow wf(be, shards, p);
  wf.setup();
  wf.mean_vector();
  Mat o = testing::decrypt_matrix(be, wf.state().o);
  EXPECT_NEAR(o(0, 0), 2, 1e-12);
  EXPECT_NEAR(o(0, 1), 3, 1e-12);
  EXPECT_EQ(be.book().step_party("step2", 0).model_ciphertexts, 1.0);
}

TEST(Flow, ProjectionSeedsP) {
  std::mt19937_64 rng(4);
  Mat A = testing::random_mat(rng, 12, 6);
  auto shards = split(A, {5, 7});
  PcaParams p = exact_params(Strategy::Seq);
  Backend be(crypto(), 2);
  Workflow wf(be, shards, p);
  wf.setup();
  wf.mean_vector();
  wf.random_projection();
  Mat P = testing::decrypt_matrix(be, wf.state().P);
  EXPECT_LE((P - wf.state().sketch * A).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(be.book().step_party("step3", 1).model_ciphertexts, static_cast<double>(p.rho()));
}

// per-party closed-form communication of each step
std::map<std::string, double> table_comm(const PcaParams& p, std::size_t m, std::size_t t, int lambda, QrVariant v,
                                         int degree) {
  const double mb = static_cast<double>(ceil_div(m, t));
  const double rho = static_cast<double>(p.rho()), psi = static_cast<double>(p.psi);
  std::map<std::string, double> c;
  c["step1"] = exact_log2(t) + 2.5;
  c["step2"] = mb;
  c["step3"] = rho * mb;
  c["step4"] = static_cast<double>(p.p) * (rho * mb + qr_comm(p.rho(), m, degree, lambda, t, v));
  c["step5"] = rho * static_cast<double>(ceil_div(p.rho(), t));
  c["step6"] = eigen_comm(p.rho(), p.w, degree, lambda, t);
  c["step7"] = psi * mb + qr_comm(p.psi, m, degree, lambda, t);
  c["step8"] = 0;
  return c;
}

TEST(Flow, CommunicationMatchesClosedForm) {
  std::mt19937_64 rng(5);
  Mat A = testing::random_mat(rng, 45, 100);
  for (Strategy s : {Strategy::Precomp, Strategy::Seq}) {
    PcaParams p = exact_params(s);
    p.p = 2;
    p.xi = 100;  // keep the single-aggregator QR
    auto shards = split(A, {20, 15, 10});
    Backend be(crypto(), 3);
    auto out = run(be, shards, p);
    ASSERT_EQ(out.variant, QrVariant::QR);
    auto want = table_comm(p, 100, 64, 7, QrVariant::QR, p.specs.qr_first.degree());
    for (const auto& [step, v] : want)
      for (int party = 0; party < 3; ++party)
        EXPECT_NEAR(be.book().step_party(step, party).model_ciphertexts, v, 1e-9) << step << " " << strategy_name(s);
    // steps whose traffic is pure aggregation are exact on the executed ledger too
    for (const char* step : {"step2", "step3", "step5", "step8"})
      EXPECT_EQ(be.book().step_party(step, 1).ciphertexts_sent, want[step]) << step;
  }
}

TEST(Flow, ZeroPowerIterations) {
  std::mt19937_64 rng(6);
  Mat A = testing::random_mat(rng, 30, 10);
  PcaParams p = exact_params(Strategy::Precomp);
  p.p = 0;
  Backend be(crypto(), 2);
  auto out = run(be, split(A, {15, 15}), p);
  auto ref = rpca_cleartext(A, p, {Strategy::Precomp, out.variant});
  EXPECT_LE((out.W - ref.W).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(be.book().step_party("step4", 0).model_ciphertexts, 0.0);
}

TEST(Flow, SelectStrategy) {
  RuntimeProfile prof;
  EXPECT_EQ(select_strategy(256, std::size_t{1} << 20, 8, 8192, prof), Strategy::Precomp);
  EXPECT_EQ(select_strategy(std::size_t{1} << 15, 256, 8, 8192, prof), Strategy::Seq);
  EXPECT_THROW(select_strategy(0, 1, 1, 8192, prof), ShapeError);
}

TEST(Flow, ForcedStrategyOverridesAuto) {
  std::mt19937_64 rng(7);
  Mat A = testing::random_mat(rng, 20, 8);
  for (Strategy s : {Strategy::Precomp, Strategy::Seq}) {
    Backend be(crypto(), 2);
    EXPECT_EQ(run(be, split(A, {10, 10}), exact_params(s)).strategy, s);
  }
}

TEST(Flow, SplitInvariance) {
  std::mt19937_64 rng(8);
  Mat A = testing::random_mat(rng, 48, 10) * 3.0;
  Mat W2, W6, Wskew;
  {
    Backend be(crypto(), 2);
    W2 = run(be, split(A, {24, 24}), exact_params(Strategy::Precomp)).W;
  }
  {
    Backend be(crypto(), 6);
    W6 = run(be, split(A, {8, 8, 8, 8, 8, 8}), exact_params(Strategy::Precomp)).W;
  }
  {
    Backend be(crypto(), 3);
    Wskew = run(be, split(A, {40, 5, 3}), exact_params(Strategy::Precomp)).W;
  }
  EXPECT_LE((W2 - W6).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((W2 - Wskew).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Flow, StrategiesAgreeAndOutputIsOrthonormal) {
  std::mt19937_64 rng(9);
  Mat A = testing::random_mat(rng, 36, 14);
  PcaOutput a, b;
  {
    Backend be(crypto(), 3);
    a = run(be, split(A, {12, 12, 12}), exact_params(Strategy::Precomp));
  }
  {
    Backend be(crypto(), 3);
    b = run(be, split(A, {12, 12, 12}), exact_params(Strategy::Seq));
  }
  EXPECT_LE((a.W - b.W).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((a.W * a.W.transpose() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
  Mat C = A.rowwise() - A.colwise().mean();
  EXPECT_LE((a.Aprime[1] - C.middleRows(12, 12) * a.W.transpose()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Flow, ReductionIsSymmetric) {
  std::mt19937_64 rng(10);
  Mat A = testing::random_mat(rng, 30, 12);
  Backend be(crypto(), 3);
  auto shards = split(A, {10, 10, 10});
  Workflow wf(be, shards, exact_params(Strategy::Seq));
  wf.setup();
  wf.mean_vector();
  wf.random_projection();
  wf.power_iterations();
  wf.reduction();
  Mat Z = testing::decrypt_matrix(be, wf.state().Z);
  EXPECT_LE((Z - Z.transpose()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Flow, ShardValidation) {
  Mat A = Mat::Ones(10, 4);
  Backend be(crypto(), 2);
  std::vector<DatasetShard> bad{{0, A.topRows(5)}, {1, Mat::Ones(5, 3)}};
  EXPECT_THROW(run(be, bad, exact_params(Strategy::Seq)), ShapeError);
  Backend one(crypto(), 3);
  EXPECT_THROW(run(one, split(A, {5, 5}), exact_params(Strategy::Seq)), ConfigError);
}

}  // namespace
}  // namespace fedpca
