// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "fedpca/cli.hpp"
#include "fedpca/collective.hpp"
#include "fedpca/enclinalg.hpp"
#include "fedpca/fedsim.hpp"
#include "fedpca/oracle.hpp"
#include "fedpca/pca_flow.hpp"
#include "fedpca/synth.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace fedpca;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<DatasetShard> even_shards(const Mat& A, int s) {
  std::vector<DatasetShard> out;
  const Eigen::Index n = A.rows();
  Eigen::Index r = 0;
  for (int p = 0; p < s; ++p) {
    Eigen::Index rows = n / s + (p < n % s ? 1 : 0);
    out.push_back({p, A.middleRows(r, rows)});
    r += rows;
  }
  return out;
}

struct FedRun {
  PcaOutput out;
  SimResult sim;
};

FedRun federated(const Mat& A, int s, const PcaParams& pca, CryptoParams crypto = {}) {
  FedRun r;
  auto shards = even_shards(A, s);
  r.sim = simulate(s, crypto, RuntimeProfile{}, NetworkModel{}, [&](Backend& be) { r.out = run(be, shards, pca); });
  return r;
}

RpcaPath path_of(const FedRun& r) { return {r.out.strategy, r.out.variant}; }

Mat gaussian(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  std::normal_distribution<double> g;
  Mat A(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = g(rng) * (1.0 + 3.0 / static_cast<double>(j + 1));
  return A;
}

fs::path scratch_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("fedpca_acceptance_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// 1
Verdict accuracy() {
  Verdict v;
  struct Case {
    std::string name;
    LabeledData data;
    std::size_t p, psi, alpha, w;
  };
  std::vector<Case> cases{{"pima", synth_pima(1), 5, 1, 1, 5}, {"wine", synth_wine(1), 15, 5, 5, 1}};
  for (const auto& c : cases) {
    PcaParams pca;
    pca.p = c.p;
    pca.psi = c.psi;
    pca.alpha = c.alpha;
    pca.w = c.w;
    pca.approx = ApproxMode::Exact;
    for (double noise : {0.0, 1e-8}) {
      CryptoParams crypto;
      crypto.noise_std = noise;
      auto t0 = Clock::now();
      FedRun r = federated(c.data.X, 6, pca, crypto);
      const double secs = seconds_since(t0);
      Metrics m = compare(r.out.W, rpca_cleartext(c.data.X, pca, path_of(r)).W);
      if (noise == 0) {
        v.check(m.r2_mean >= 0.99 && m.mse <= 1e-6,
                fmt::format("{} r2 {:.6f} mse {:.2e} ({:.1f} s)", c.name, m.r2_mean, m.mse, secs));
      } else {
        v.check(m.r2_mean >= 0.98, fmt::format("{} noisy r2 {:.6f}", c.name, m.r2_mean));
      }
      v.check(secs < 120, fmt::format("{} host {:.1f} s < 120 s", c.name, secs));
    }
  }
  return v;
}

// 2
Verdict shadowing() {
  Verdict v;
  std::mt19937_64 rng(2026);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const int party_choices[] = {2, 3, 6};
  double worst = 0;
  int dqr = 0;
  auto t0 = Clock::now();
  for (int k = 0; k < 50; ++k) {
    const int s = party_choices[pick(0, 2)];
    const std::size_t m = pick(4, 64), n = pick(static_cast<std::size_t>(s) * 4, 256);
    PcaParams pca;
    pca.approx = ApproxMode::Exact;
    pca.p = pick(0, 3);
    pca.w = pick(1, 5);
    pca.psi = pick(1, 3);
    pca.alpha = pick(1, 3);
    pca.strategy = k % 2 ? Strategy::Seq : Strategy::Precomp;
    pca.xi = k % 4 == 1 ? 1e-3 : 100.0;
    pca.sketch_seed = static_cast<std::uint64_t>(k) + 1;
    CryptoParams crypto;
    crypto.ring_degree = 512;
    Mat A = gaussian(rng, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    FedRun r = federated(A, s, pca, crypto);
    dqr += r.out.variant == QrVariant::DQR;
    Mat W = rpca_cleartext(A, pca, path_of(r)).W;
    worst = std::max(worst, (r.out.W - W).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  v.check(worst <= 1e-9, fmt::format("50 instances, max |W - W_oracle| {:.2e}", worst));
  v.check(dqr > 0, fmt::format("{} used DQR", dqr));
  v.check(secs < 300, fmt::format("{:.1f} s < 300 s", secs));
  return v;
}

// 3
Verdict split_invariance() {
  Verdict v;
  fs::path dir = scratch_dir("split");
  write_csv((dir / "clusters.csv").string(), synth_clusters(60, 12, 3, 5.0, 3));
  nlohmann::json base = {{"dataset", "clusters.csv"},
                         {"label_column", "label"},
                         {"mode", "all"},
                         {"seed", 4},
                         {"pca", {{"num_pcs", 2}, {"oversampling", 2}, {"power_iterations", 3}, {"eigen_iterations", 5},
                                  {"strategy", "precomp"}}}};
  nlohmann::json even = base, by_label = base;
  even["parties"] = 4;
  even["partition"] = "even";
  by_label["parties"] = 3;
  by_label["partition"] = "by_label";
  RunArtifacts a = run_config(parse_config(even, dir.string()));
  RunArtifacts b = run_config(parse_config(by_label, dir.string()));
  Mat Wa(a.report["federated"]["W"].size(), a.report["federated"]["W"][0].size());
  Mat Wb(Wa.rows(), Wa.cols());
  for (Eigen::Index i = 0; i < Wa.rows(); ++i)
    for (Eigen::Index j = 0; j < Wa.cols(); ++j) {
      Wa(i, j) = a.report["federated"]["W"][i][j].get<double>();
      Wb(i, j) = b.report["federated"]["W"][i][j].get<double>();
    }
  const double diff = (Wa - Wb).cwiseAbs().maxCoeff();
  v.check(diff <= 1e-9, fmt::format("even vs by-label max diff {:.2e}", diff));
  const double fed = b.report["federated"]["metrics"]["vs_exact"]["r2_mean"].get<double>();
  const double meta = b.report["meta"]["metrics"]["vs_exact"]["r2_mean"].get<double>();
  v.check(meta <= fed - 0.05, fmt::format("r2 federated {:.4f} vs meta {:.4f}", fed, meta));
  fs::remove_all(dir);
  return v;
}

// 4
Verdict cost_exactness() {
  Verdict v;
  const RuntimeProfile prof;
  struct Shape {
    std::size_t a, b, c;
  };
  for (Shape sh : {Shape{8, 256, 256}, Shape{8, 256, 1024}, Shape{2, 8192, 64}}) {
    Backend be(CryptoParams{});
    const std::size_t t = be.slots();
    std::mt19937_64 rng(sh.a * 7 + sh.b + sh.c);
    auto M = encrypt_matrix(be, testing::random_mat(rng, static_cast<Eigen::Index>(sh.a), static_cast<Eigen::Index>(sh.b)));
    Mat N = testing::random_mat(rng, static_cast<Eigen::Index>(sh.b), static_cast<Eigen::Index>(sh.c));
    auto mu = encrypt_matrix(be, testing::random_mat(rng, 1, static_cast<Eigen::Index>(sh.b))).data[0];
    auto run_delta = [&](const std::function<void()>& f) {
      auto before = be.book().party_total(0);
      f();
      return be.book().party_total(0) - before;
    };
    std::vector<std::pair<Method, std::function<void()>>> runs{
        {Method::M1, [&] { mul_m1(be, M, N); }},
        {Method::M2, [&] { mul_m2(be, M, N); }},
        {Method::M3, [&] { mul_m3(be, M, N); }},
        {Method::M4, [&] { mul_m4(be, M, mu, 1); }},
    };
    for (auto& [method, f] : runs) {
      if (method == Method::M3 && !applicable(Method::M3, sh.a, sh.b, sh.c, t)) continue;
      auto want = cost_of(method, sh.a, sh.b, sh.c, t, prof);
      auto got = run_delta(f);
      v.check(got.mults() == want.mults() && got.rotations == want.rots,
              fmt::format("{} ({},{},{}) mults {}/{} rots {}/{}", method_name(method), sh.a, sh.b, sh.c, got.mults(),
                          want.mults(), got.rotations, want.rots));
    }
  }

  PcaParams pca;
  pca.p = 10;
  pca.psi = 4;
  pca.alpha = 4;
  pca.approx = ApproxMode::Exact;
  std::mt19937_64 rng(4);
  Mat A = gaussian(rng, 6 * 256, 256);
  FedRun r = federated(A, 6, pca);
  CryptoParams crypto;
  auto want = expected_comm(pca, 6 * 256, 256, crypto.slot_count(), crypto.level_budget, r.out.variant);
  int matched = 0;
  for (const auto& [step, value] : want) {
    bool ok = true;
    double got = 0;
    for (int p = 0; p < 6; ++p) {
      got = r.sim.book.step_party(step, p).model_ciphertexts;
      ok = ok && std::abs(got - value) <= 1e-9;
    }
    matched += ok;
    if (!ok) v.check(false, fmt::format("table {} comm {:.6f} vs {:.6f}", step, got, value));
  }
  v.check(matched == static_cast<int>(want.size()),
          fmt::format("per-step communication {}/{} steps ({})", matched, want.size(), strategy_name(r.out.strategy)));
  return v;
}

// 5
Verdict linalg() {
  Verdict v;
  std::mt19937_64 rng(5);
  double res = 0, orth = 0, dqr = 0;
  for (int k = 0; k < 20; ++k) {
    Mat V = testing::random_mat(rng, 8, 64);
    Backend be(testing::small_params(64)), bd(testing::small_params(64), 3);
    Approximator ap(ApproxMode::Exact);
    auto q = qr_t(be, ap, encrypt_matrix(be, V), HHSpecs{}, HHSpecs{});
    Mat Q = testing::decrypt_matrix(be, q.Q), R = testing::decrypt_matrix(be, q.R);
    res = std::max(res, (R * Q - V).norm() / V.norm());
    orth = std::max(orth, (Q * Q.transpose() - Mat::Identity(8, 8)).cwiseAbs().maxCoeff());
    std::vector<EncMatrix> shards;
    const Eigen::Index cuts[] = {0, 20, 41, 64};
    for (int p = 0; p < 3; ++p) {
      ActorScope one(bd, {p});
      shards.push_back(encrypt_matrix(bd, V.middleCols(cuts[p], cuts[p + 1] - cuts[p])));
    }
    auto d = dqr_t(bd, ap, shards, HHSpecs{}, HHSpecs{});
    for (int p = 0; p < 3; ++p) {
      Mat Qp = testing::decrypt_matrix(bd, d.Q[static_cast<std::size_t>(p)]);
      dqr = std::max(dqr, (Qp - Q.middleCols(cuts[p], cuts[p + 1] - cuts[p])).cwiseAbs().maxCoeff());
    }
    dqr = std::max(dqr, (testing::decrypt_matrix(bd, d.R) - R).cwiseAbs().maxCoeff());
  }
  v.check(res <= 1e-6 && orth <= 1e-6, fmt::format("qr residual {:.2e}, orthogonality {:.2e}", res, orth));
  v.check(dqr <= 1e-9, fmt::format("dqr vs qr {:.2e}", dqr));

  double worst = 0;
  bool sorted = true;
  for (int k = 0; k < 20; ++k) {
    Mat B = testing::random_mat(rng, 8, 8);
    Mat Z = (B + B.transpose()) / 2;
    Backend be(testing::small_params(64));
    Approximator ap(ApproxMode::Exact);
    auto e = eigen(be, ap, encrypt_matrix(be, Z), 5, LinalgSpecs{});
    auto L = debug_decrypt(be, e.l);
    ClearEig ref = eig_bruteforce(Z);
    for (Eigen::Index i = 0; i < 8; ++i) {
      const double li = L[static_cast<std::size_t>(i)];
      worst = std::max(worst, std::abs(li - ref.l(i)) / std::max(std::abs(ref.l(i)), 1e-12));
      if (i > 0 && li > L[static_cast<std::size_t>(i - 1)]) sorted = false;
    }
  }
  v.check(worst <= 1e-3, fmt::format("eigen relative error {:.2e}", worst));
  v.check(sorted, "eigenvalues descending");
  return v;
}

// 6
Verdict approximation() {
  Verdict v;
  Backend be(testing::small_params(64, 9));
  auto c = chebyshev_fit([](double x) { return std::sqrt(x); }, 0.01, 1, 31);
  auto x = be.encrypt(std::vector<double>{0.25, 0.5});
  auto before = be.book().party_total(0);
  auto y = eval_poly_bsgs(be, x, c, 0.01, 1);
  auto delta = be.book().party_total(0) - before;
  v.check(x.level() - y.level() == 6, fmt::format("levels consumed {}", x.level() - y.level()));
  v.check(static_cast<double>(delta.mults_cc) <= 2 * std::sqrt(62.0) + 2.5 + 4,
          fmt::format("cc-mults {} <= {:.2f}", delta.mults_cc, 2 * std::sqrt(62.0) + 2.5 + 4));
  double worst = 0;
  for (int i = 0; i <= 100000; ++i) {
    const double z = 0.01 + 0.99 * i / 100000.0;
    worst = std::max(worst, std::abs(clenshaw(c, 0.01, 1, z) - std::sqrt(z)));
  }
  v.check(worst <= 1e-3, fmt::format("sqrt max error {:.2e}", worst));
  return v;
}

double wall_of(int s, std::size_t ni, std::size_t m, Strategy strategy) {
  std::mt19937_64 rng(ni * 131 + m + static_cast<std::size_t>(s));
  Mat A = gaussian(rng, static_cast<Eigen::Index>(ni) * s, static_cast<Eigen::Index>(m));
  PcaParams pca;
  pca.approx = ApproxMode::Exact;
  pca.strategy = strategy;
  return federated(A, s, pca).sim.wall.wall;
}

// 7
Verdict scaling() {
  Verdict v;
  auto launch = [](int s, std::size_t ni, std::size_t m, Strategy st) {
    return std::async(std::launch::async, wall_of, s, ni, m, st);
  };
  auto s6 = launch(6, 1024, 256, Strategy::Auto), s12 = launch(12, 1024, 256, Strategy::Auto);
  std::vector<std::future<double>> flat, seq;
  for (std::size_t ni : {256, 1024, 4096}) flat.push_back(launch(6, ni, 256, Strategy::Precomp));
  for (std::size_t m : {8192, 16384, 32768}) seq.push_back(launch(6, 64, m, Strategy::Seq));

  const double w6 = s6.get(), w12 = s12.get();
  v.check(w12 / w6 <= 1.15, fmt::format("s 6->12 wall {:.1f} -> {:.1f} s, ratio {:.3f}", w6, w12, w12 / w6));
  std::vector<double> f, q;
  for (auto& x : flat) f.push_back(x.get());
  for (auto& x : seq) q.push_back(x.get());
  const double spread = *std::max_element(f.begin(), f.end()) / *std::min_element(f.begin(), f.end());
  v.check(spread <= 1.01, fmt::format("precomp n_i 256/1024/4096 wall {:.1f}/{:.1f}/{:.1f} s", f[0], f[1], f[2]));
  const double k[] = {1, 2, 4};
  bool lin = true;
  for (int i = 1; i < 3; ++i) lin = lin && q[i] > q[i - 1] && q[i] / q[0] <= 1.1 * k[i];
  v.check(lin, fmt::format("seq ceil(m/t) 1/2/4 wall {:.1f}/{:.1f}/{:.1f} s (at most linear)", q[0], q[1], q[2]));
  return v;
}

// 8
Verdict determinism() {
  Verdict v;
  fs::path dir = scratch_dir("determinism");
  write_csv((dir / "toy.csv").string(), synth_clusters(40, 10, 3, 3.0, 8));
  nlohmann::json cfg = {{"dataset", "toy.csv"},
                        {"label_column", "label"},
                        {"parties", 3},
                        {"seed", 99},
                        {"crypto", {{"noise_std", 1e-8}}},
                        {"pca", {{"num_pcs", 2}, {"oversampling", 2}}}};
  RunConfig c = parse_config(cfg, dir.string());
  write_artifacts(run_config(c), (dir / "a").string());
  write_artifacts(run_config(c), (dir / "b").string());
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
  };
  std::size_t same = 0, total = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    ++total;
    same += slurp(e.path()) == slurp(dir / "b" / e.path().filename());
  }
  v.check(total >= 4 && same == total, fmt::format("{}/{} artifacts byte-identical", same, total));
  fs::remove_all(dir);
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*fn)();
  };
  const Criterion criteria[] = {
      {"accuracy vs centralized oracle", accuracy},
      {"exact oracle shadowing", shadowing},
      {"split invariance", split_invariance},
      {"cost-formula exactness", cost_exactness},
      {"linear-algebra residuals", linalg},
      {"approximation depth and cost", approximation},
      {"scaling properties", scaling},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    Verdict v;
    try {
      v = criteria[i].fn();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].name << ": " << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
