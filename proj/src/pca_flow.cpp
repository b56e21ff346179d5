// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/pca_flow.hpp"

#include <algorithm>
#include <optional>
#include <random>

#include "fedpca/collective.hpp"
#include "fedpca/fedsim.hpp"
#include "fedpca/oracle.hpp"

namespace fedpca {

namespace {

int as_party(std::size_t p) { return static_cast<int>(p); }

// Lazy centering, right side: row r of the result is (M_r . o) repeated over `width` columns.
EncMatrix row_dot_dup(Backend& be, const EncMatrix& M, const EncMatrix& o, std::size_t width) {
  const std::size_t t = be.slots();
  EncMatrix R;
  R.rows = M.rows;
  R.cols = width;
  R.data.assign(M.rows, std::vector<Ciphertext>(ceil_div(width, t)));
  for (std::size_t r = 0; r < M.rows; ++r) {
    std::optional<Ciphertext> x;
    for (std::size_t k = 0; k < M.blocks(); ++k) {
      Ciphertext y = be.mul_cipher(M.data[r][k], o.data[0][k]);
      x = x ? be.add(*x, y) : y;
    }
    Ciphertext tot = be.sum_all(be.maintain(*x));
    for (std::size_t q = 0; q < R.blocks(); ++q) {
      OverheadScope ov(be);
      R.data[r][q] = be.maintain(be.mul_plain(tot, be.window(0, std::min(t, width - q * t))));
    }
  }
  return equalize(be, R);
}

// Lazy centering, left side: row r of the result is (sum of X_r) * o.
EncMatrix row_sum_times(Backend& be, const EncMatrix& X, const EncMatrix& o) {
  EncMatrix R;
  R.rows = X.rows;
  R.cols = o.cols;
  R.data.assign(X.rows, std::vector<Ciphertext>(o.blocks()));
  for (std::size_t r = 0; r < X.rows; ++r) {
    Ciphertext x = X.data[r][0];
    for (std::size_t k = 1; k < X.blocks(); ++k) x = be.add(x, X.data[r][k]);
    Ciphertext tot = be.sum_all(x);
    for (std::size_t q = 0; q < o.blocks(); ++q) R.data[r][q] = be.maintain(be.mul_cipher(tot, o.data[0][q]));
  }
  return equalize(be, R);
}

// Product with an encrypted symmetric matrix, whose rows double as its columns.
EncMatrix mul_symmetric(Backend& be, const EncMatrix& M, const EncMatrix& S, const RuntimeProfile& prof) {
  const std::size_t t = be.slots();
  const double c1 = cost_of(Method::M1, M.rows, M.cols, S.cols, t, prof, RightOperand::EncColumns).weighted;
  const double c2 = cost_of(Method::M2, M.rows, M.cols, S.cols, t, prof, RightOperand::EncRows).weighted;
  return c1 < c2 ? mul_m1(be, M, S) : mul_m2(be, M, S);
}

Mat upsampled(const Mat& A, std::size_t n, std::uint64_t seed) {
  if (static_cast<std::size_t>(A.rows()) == n) return A;
  std::mt19937_64 eng(seed ^ 0x9e3779b97f4a7c15ULL);
  Mat out(static_cast<Eigen::Index>(n), A.cols());
  for (std::size_t r = 0; r < n; ++r)
    out.row(static_cast<Eigen::Index>(r)) = A.row(static_cast<Eigen::Index>(eng() % static_cast<std::uint64_t>(A.rows())));
  return out;
}

}  // namespace

std::map<std::string, double> expected_comm(const PcaParams& params, std::size_t n, std::size_t m, std::size_t t,
                                            int lambda, QrVariant variant) {
  const int d = params.specs.qr_first.degree();
  const double mb = static_cast<double>(ceil_div(m, t));
  const double rho = static_cast<double>(params.rho()), psi = static_cast<double>(params.psi);
  double iter = rho * mb + qr_comm(params.rho(), m, d, lambda, t);
  if (variant == QrVariant::DQR) iter += qr_comm(params.rho(), n, d, lambda, t, QrVariant::DQR);
  std::map<std::string, double> c;
  c[step_label(1)] = exact_log2(t) + 2.5;
  c[step_label(2)] = mb;
  c[step_label(3)] = rho * mb;
  c[step_label(4)] = static_cast<double>(params.p) * iter;
  c[step_label(5)] = rho * static_cast<double>(ceil_div(params.rho(), t));
  c[step_label(6)] = eigen_comm(params.rho(), params.w, d, lambda, t);
  c[step_label(7)] = psi * mb + qr_comm(params.psi, m, d, lambda, t);
  c[step_label(8)] = 0;
  return c;
}

Strategy select_strategy(std::size_t m, std::size_t n_max, std::size_t rho, std::size_t t, const RuntimeProfile& prof) {
  if (m == 0 || n_max == 0 || rho == 0) throw ShapeError("strategy selection needs positive dimensions");
  const double enc = std::min(cost_of(Method::M1, rho, m, m, t, prof, RightOperand::EncColumns).weighted,
                              cost_of(Method::M2, rho, m, m, t, prof, RightOperand::EncRows).weighted);
  const double precomp = enc + 3.0 * static_cast<double>(m) * prof.mult_cc + static_cast<double>(m) * prof.rotate;
  const double seq = zeta_star(rho, m, n_max, t, prof) + zeta_star(rho, n_max, m, t, prof) +
                     cost_of(Method::M4, rho, m, m, t, prof).weighted +
                     cost_of(Method::M4, rho, n_max, n_max, t, prof).weighted;
  return precomp <= seq ? Strategy::Precomp : Strategy::Seq;
}

Workflow::Workflow(Backend& be, const std::vector<DatasetShard>& shards, PcaParams params, RuntimeProfile prof)
    : be_(be), shards_(shards), params_(std::move(params)), prof_(prof), ap_(params_.approx) {}

void Workflow::setup() {
  StepScope step(be_, step_label(1));
  if (static_cast<int>(shards_.size()) != be_.parties()) throw ConfigError("one shard per party is required");
  if (shards_.empty()) throw ConfigError("no shards");
  st_.m = static_cast<std::size_t>(shards_[0].A.cols());
  st_.n = 0;
  st_.n_max = 0;
  for (std::size_t p = 0; p < shards_.size(); ++p) {
    const auto& s = shards_[p];
    if (s.party != as_party(p)) throw ConfigError("shard parties must be numbered 0..s-1 in order");
    if (static_cast<std::size_t>(s.A.cols()) != st_.m) throw ShapeError("shards differ in feature count");
    if (s.A.rows() == 0) throw ShapeError("empty shard");
    if (!s.A.allFinite()) throw ConfigError("shard contains non-finite values");
    st_.n += static_cast<std::size_t>(s.A.rows());
    st_.n_max = std::max(st_.n_max, static_cast<std::size_t>(s.A.rows()));
  }
  params_.validate(st_.n, st_.m);
  dkeygen(be_);
  st_.sketch = count_sketch(params_.rho(), st_.n, params_.sketch_seed);

  st_.strategy = params_.strategy == Strategy::Auto
                     ? select_strategy(st_.m, st_.n_max, params_.rho(), be_.slots(), prof_)
                     : params_.strategy;
  st_.variant = st_.strategy == Strategy::Seq ? choose_qr(st_.n_max, st_.m, params_.xi) : QrVariant::QR;

  st_.specs = params_.specs;
  if (params_.auto_intervals) {
    // the largest party simulates the joint data by upsampling its own rows
    std::size_t lead = 0;
    for (std::size_t p = 1; p < shards_.size(); ++p)
      if (shards_[p].A.rows() > shards_[lead].A.rows()) lead = p;
    RangeRecorder rec;
    PcaParams sim = params_;
    rpca_cleartext(upsampled(shards_[lead].A, st_.n, params_.sketch_seed), sim, {st_.strategy, st_.variant}, &rec);
    st_.specs = fit_intervals(rec, params_.specs, params_.interval_factor);
  }

  At_.resize(shards_.size());
  parallel_for(shards_.size(), [&](std::size_t p) { At_[p] = shards_[p].A.transpose(); });
}

void Workflow::mean_vector() {
  StepScope step(be_, step_label(2));
  const double inv_n = 1.0 / static_cast<double>(st_.n);
  std::vector<EncMatrix> parts(shards_.size());
  for (std::size_t p = 0; p < shards_.size(); ++p) {
    ActorScope one(be_, {as_party(p)});
    Mat sums = shards_[p].A.colwise().sum() * inv_n;
    parts[p] = encrypt_matrix(be_, sums);
  }
  st_.o = aggregate_broadcast(be_, parts);
}

void Workflow::random_projection() {
  StepScope step(be_, step_label(3));
  std::vector<Mat> local(shards_.size());
  std::vector<Eigen::Index> offset(shards_.size(), 0);
  for (std::size_t p = 1; p < shards_.size(); ++p) offset[p] = offset[p - 1] + shards_[p - 1].A.rows();
  parallel_for(shards_.size(), [&](std::size_t p) {
    local[p] = st_.sketch.middleCols(offset[p], shards_[p].A.rows()) * shards_[p].A;
  });
  std::vector<EncMatrix> parts(shards_.size());
  for (std::size_t p = 0; p < shards_.size(); ++p) {
    ActorScope one(be_, {as_party(p)});
    parts[p] = encrypt_matrix(be_, local[p]);
  }
  st_.P = aggregate_broadcast(be_, parts);
}

// M x C_i^T with C_i the centered local data: rows x n_i.
EncMatrix Workflow::centered_right(std::size_t p, const EncMatrix& M) {
  EncMatrix prod = multiply(be_, M, At_[p], prof_);
  EncMatrix corr = row_dot_dup(be_, M, st_.o, static_cast<std::size_t>(shards_[p].A.rows()));
  return sub(be_, prod, corr);
}

// X x C_i / n: rows x m.
EncMatrix Workflow::centered_left(std::size_t p, const EncMatrix& X) {
  EncMatrix prod = multiply(be_, X, shards_[p].A, prof_);
  EncMatrix corr = row_sum_times(be_, X, st_.o);
  return mul_const(be_, sub(be_, prod, corr), 1.0 / static_cast<double>(st_.n));
}

EncMatrix Workflow::local_cov_product(std::size_t p, const EncMatrix& P) {
  if (st_.strategy == Strategy::Precomp) return mul_symmetric(be_, P, st_.G[p], prof_);
  return centered_left(p, centered_right(p, P));
}

void Workflow::orthogonalize_P(const EncMatrix& Y, bool first) {
  const HHSpecs& sp = first ? st_.specs.qr_first : st_.specs.qr_rest;
  st_.P = qr_t(be_, ap_, Y, sp, sp).Q;
}

void Workflow::power_iterations() {
  StepScope step(be_, step_label(4));
  const std::size_t s = shards_.size(), m = st_.m, t = be_.slots();
  const bool precomp = st_.strategy == Strategy::Precomp;
  if (precomp && st_.G.empty()) {
    // G_i = (A_i^T A_i - s_i o - o^T s_i^T + n_i o^T o) / n, row r folded as
    // (A_i^T A_i)_r / n - (s_i[r] / n) o + o[r] (n_i o - s_i) / n
    const double inv_n = 1.0 / static_cast<double>(st_.n);
    std::vector<Mat> gram(s);
    parallel_for(s, [&](std::size_t p) { gram[p] = (At_[p] * shards_[p].A) * inv_n; });
    st_.G.resize(s);
    for (std::size_t p = 0; p < s; ++p) {
      ActorScope one(be_, {as_party(p)});
      const Mat& A = shards_[p].A;
      Vec sums = A.colwise().sum().transpose();
      const double ni = static_cast<double>(A.rows());
      EncMatrix G = encrypt_matrix(be_, gram[p]);
      EncMatrix u;
      u.rows = 1;
      u.cols = m;
      u.data.assign(1, std::vector<Ciphertext>(st_.o.blocks()));
      for (std::size_t q = 0; q < st_.o.blocks(); ++q) {
        std::vector<double> neg(t, 0.0);
        for (std::size_t j = q * t; j < std::min(m, (q + 1) * t); ++j) neg[j - q * t] = -sums(static_cast<Eigen::Index>(j)) * inv_n;
        u.data[0][q] = be_.add_plain(be_.mul_const(st_.o.data[0][q], ni * inv_n), neg);
      }
      for (std::size_t r = 0; r < m; ++r) {
        Ciphertext orr;
        {
          OverheadScope ov(be_);
          orr = be_.maintain(be_.mul_plain(st_.o.data[0][r / t], be_.onehot(r % t)));
          orr = be_.rotate(orr, static_cast<long>(r % t));
        }
        orr = be_.dup(orr, std::min(m, t));
        const double sr = sums(static_cast<Eigen::Index>(r)) * inv_n;
        for (std::size_t q = 0; q < G.blocks(); ++q) {
          Ciphertext term = be_.maintain(be_.mul_cipher(orr, u.data[0][q]));
          term = be_.sub(term, be_.mul_const(st_.o.data[0][q], sr));
          G.data[r][q] = be_.add(G.data[r][q], term);
        }
      }
      st_.G[p] = equalize(be_, G);
    }
  }

  const int need_iter = precomp ? 2 : 4;
  for (std::size_t it = 0; it < params_.p; ++it) {
    st_.P = ensure_level(be_, st_.P, need_iter);
    std::vector<EncMatrix> parts(s);
    if (!precomp && st_.variant == QrVariant::DQR) {
      std::vector<EncMatrix> X(s);
      for (std::size_t p = 0; p < s; ++p) {
        ActorScope one(be_, {as_party(p)});
        X[p] = centered_right(p, st_.P);
      }
      const HHSpecs& sp = it == 0 ? st_.specs.qr_first : st_.specs.qr_rest;
      DqrResult f = dqr_t(be_, ap_, X, sp, sp);
      for (std::size_t p = 0; p < s; ++p) {
        ActorScope one(be_, {as_party(p)});
        EncMatrix q = ensure_level(be_, f.Q[p], 2, true);
        parts[p] = centered_left(p, q);
      }
    } else {
      for (std::size_t p = 0; p < s; ++p) {
        ActorScope one(be_, {as_party(p)});
        parts[p] = local_cov_product(p, st_.P);
      }
    }
    orthogonalize_P(aggregate_broadcast(be_, parts), it == 0);
  }
  st_.P = ensure_level(be_, st_.P, precomp ? 4 : 5);
}

void Workflow::reduction() {
  StepScope step(be_, step_label(5));
  const std::size_t s = shards_.size();
  std::vector<EncMatrix> parts(s);
  st_.cache.assign(s, {});
  for (std::size_t p = 0; p < s; ++p) {
    ActorScope one(be_, {as_party(p)});
    if (st_.strategy == Strategy::Precomp) {
      st_.cache[p] = mul_symmetric(be_, st_.P, st_.G[p], prof_);
      parts[p] = mul_m1(be_, st_.cache[p], st_.P);
    } else {
      st_.cache[p] = centered_right(p, st_.P);
      parts[p] = mul_const(be_, mul_m1(be_, st_.cache[p], st_.cache[p]), 1.0 / static_cast<double>(st_.n));
    }
  }
  st_.Z = aggregate_broadcast(be_, parts);
}

void Workflow::eigendecomposition() {
  StepScope step(be_, step_label(6));
  st_.eig = eigen(be_, ap_, st_.Z, params_.w, st_.specs);
  // Seq spends one more level on the centered product in the reconstruction
  const int need = st_.strategy == Strategy::Seq ? 3 : 2;
  st_.eig_top = ensure_level(be_, slice_rows(st_.eig.Q, 0, params_.psi), need);
}

void Workflow::reconstruction() {
  StepScope step(be_, step_label(7));
  const std::size_t s = shards_.size();
  std::vector<EncMatrix> parts(s);
  for (std::size_t p = 0; p < s; ++p) {
    ActorScope one(be_, {as_party(p)});
    EncMatrix u = mul_m2(be_, st_.eig_top, st_.cache[p]);
    parts[p] = st_.strategy == Strategy::Precomp ? u : centered_left(p, u);
  }
  EncMatrix Wp = aggregate_broadcast(be_, parts);
  st_.W = qr_t(be_, ap_, Wp, st_.specs.qr_rest, st_.specs.qr_rest).Q;
  st_.W = ensure_level(be_, st_.W, 2);
}

void Workflow::projection() {
  StepScope step(be_, step_label(8));
  const std::size_t s = shards_.size();
  st_.Aprime_t.assign(s, {});
  for (std::size_t p = 0; p < s; ++p) {
    ActorScope one(be_, {as_party(p)});
    st_.Aprime_t[p] = centered_right(p, st_.W);
  }
}

void Workflow::run_all() {
  setup();
  mean_vector();
  random_projection();
  power_iterations();
  reduction();
  eigendecomposition();
  reconstruction();
  projection();
}

PcaOutput run(Backend& be, const std::vector<DatasetShard>& shards, const PcaParams& params, const RuntimeProfile& prof) {
  Workflow wf(be, shards, params, prof);
  wf.run_all();
  const WorkflowState& st = wf.state();
  PcaOutput out;
  out.strategy = st.strategy;
  out.variant = st.variant;
  out.specs = st.specs;
  StepScope step(be, kOutputStep);
  out.W = release_matrix(be, st.W);
  const std::size_t t = be.slots();
  for (std::size_t p = 0; p < shards.size(); ++p) {
    const EncMatrix& At = st.Aprime_t[p];
    Mat Ap(static_cast<Eigen::Index>(At.cols), static_cast<Eigen::Index>(At.rows));
    for (std::size_t r = 0; r < At.rows; ++r)
      for (std::size_t q = 0; q < At.blocks(); ++q) {
        auto v = readout(dkeyswitch(be, At.data[r][q], as_party(p)), as_party(p));
        for (std::size_t j = q * t; j < std::min(At.cols, (q + 1) * t); ++j)
          Ap(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(r)) = v[j - q * t];
      }
    out.Aprime.push_back(std::move(Ap));
  }
  return out;
}

}  // namespace fedpca
