// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>

#include "fedpca/collective.hpp"
#include "fedpca/fedsim.hpp"
#include "fedpca/pca_flow.hpp"
#include "test_util.hpp"

namespace fedpca {
namespace {

CryptoParams crypto(std::size_t t = 64) { return testing::small_params(t); }

TEST(Fedsim, ZeroOpProgramTakesNoTime) {
  auto r = simulate(4, crypto(), RuntimeProfile{}, NetworkModel{}, [](Backend&) {});
  EXPECT_EQ(r.wall.wall, 0.0);
  EXPECT_TRUE(r.barriers.empty());
}

TEST(Fedsim, BootstrapBarrierOnSixParties) {
  NetworkModel net;
  BarrierEvent ev{"x", BarrierKind::Bootstrap, 1, 6};
  const double hop = net.latency_s + net.ciphertext_bytes * 8 / net.bandwidth_bps;
  EXPECT_NEAR(hop, 0.04, 1e-15);
  EXPECT_NEAR(barrier_seconds(ev, net), 5 * hop, 1e-12);
  EXPECT_GE(barrier_seconds(ev, net), hop);

  RuntimeProfile prof;
  auto r = simulate(6, crypto(), prof, net, [](Backend& be) {
    auto c = be.encrypt(std::vector<double>{1.0});
    c = dbootstrap(be, c);
  });
  ASSERT_EQ(r.barriers.size(), 1u);
  EXPECT_NEAR(r.wall.barrier, 0.2, 1e-12);
  EXPECT_NEAR(r.wall.wall, prof.dbootstrap + 0.2, 1e-12);
  for (int p = 0; p < 6; ++p) EXPECT_EQ(r.book.party_total(p).bootstraps, 1u);
}

TEST(Fedsim, StarTopology) {
  NetworkModel net;
  net.topology = Topology::Star;
  BarrierEvent ev{"x", BarrierKind::Aggregate, 2, 4};
  EXPECT_NEAR(barrier_seconds(ev, net), 2 * (0.02 + 3 * 0.04), 1e-12);
  EXPECT_EQ(barrier_seconds({"x", BarrierKind::Aggregate, 2, 1}, net), 0.0);
}

TEST(Fedsim, AggregateOfEightCiphertexts) {
  auto r = simulate(6, crypto(), RuntimeProfile{}, NetworkModel{}, [](Backend& be) {
    std::mt19937_64 rng(1);
    std::vector<EncMatrix> parts;
    for (int p = 0; p < 6; ++p) {
      ActorScope one(be, {p});
      parts.push_back(encrypt_matrix(be, testing::random_mat(rng, 8, 10)));
    }
    StepScope step(be, "agg");
    aggregate_broadcast(be, parts);
  });
  for (int p = 0; p < 6; ++p) {
    auto l = r.book.step_party("agg", p);
    EXPECT_EQ(l.ciphertexts_sent, 8.0);
    EXPECT_EQ(l.ciphertexts_received, 8.0);
    EXPECT_EQ(l.model_ciphertexts, 8.0);
  }
  ASSERT_EQ(r.barriers.size(), 1u);
  EXPECT_EQ(r.barriers[0].payload_ciphertexts, 8.0);
}

TEST(Fedsim, BarrierArityMismatch) {
  Backend be(crypto(), 3);
  ActorScope two(be, {0, 1});
  EXPECT_THROW(barrier_exchange(be, BarrierKind::Aggregate, 1), ProtocolError);
}

TEST(Fedsim, BarrierExchangeCounters) {
  Backend be(crypto(), 3);
  barrier_exchange(be, BarrierKind::Bootstrap, 1);
  barrier_exchange(be, BarrierKind::KeySwitch, 2);
  for (int p = 0; p < 3; ++p) {
    auto l = be.book().party_total(p);
    EXPECT_EQ(l.bootstraps, 1u);
    EXPECT_EQ(l.keyswitches, 2u);
    EXPECT_EQ(l.ciphertexts_sent, 3.0);
  }
}

TEST(Fedsim, SlowestPartyLaw) {
  RuntimeProfile prof;
  NetworkModel net;
  auto r = simulate(3, crypto(), prof, net, [](Backend& be) {
    auto c = be.encrypt(std::vector<double>{1.0, 2.0});
    for (int p = 0; p < 3; ++p) {
      ActorScope one(be, {p});
      for (int k = 0; k <= 3 * p; ++k) c = be.maintain(be.mul_plain(be.rotate(c, 1), std::vector<double>{1.0}));
      c = be.refreshed(c);
    }
    barrier_exchange(be, BarrierKind::Aggregate, 1);
  });
  double mx = 0;
  for (double v : r.wall.party_local) mx = std::max(mx, v);
  EXPECT_NEAR(r.wall.party_local[2], 7 * (prof.mult_pc + prof.rotate), 1e-9);
  EXPECT_EQ(r.wall.slowest_local, mx);
  EXPECT_NEAR(r.wall.wall, mx + r.wall.barrier, 1e-12);
  EXPECT_NEAR(r.wall.barrier, 2 * 0.04, 1e-12);
}

TEST(Fedsim, ProfileValidation) {
  RuntimeProfile prof;
  prof.mult_pc = prof.mult_cc;
  EXPECT_THROW(prof.validate(), ConfigError);
  NetworkModel net;
  net.bandwidth_bps = 0;
  EXPECT_THROW(net.validate(), ConfigError);
}

TEST(Fedsim, ParallelForVisitsEverySlot) {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(4, [](std::size_t i) {
                 if (i == 2) throw ShapeError("boom");
               }),
               ShapeError);
}

struct FlowRun {
  Mat W;
  SimResult sim;
};

FlowRun run_flow(const char* threads) {
  setenv("FEDPCA_THREADS", threads, 1);
  std::mt19937_64 rng(11);
  Mat A = testing::random_mat(rng, 60, 20);
  std::vector<DatasetShard> shards;
  for (int p = 0; p < 4; ++p) shards.push_back({p, A.middleRows(15 * p, 15)});
  PcaParams params;
  params.p = 2;
  params.psi = 2;
  params.alpha = 2;
  params.approx = ApproxMode::Exact;
  FlowRun fr;
  fr.sim = simulate(4, crypto(), RuntimeProfile{}, NetworkModel{},
                    [&](Backend& be) { fr.W = run(be, shards, params).W; });
  unsetenv("FEDPCA_THREADS");
  return fr;
}

TEST(Fedsim, IndependentOfThreadCount) {
  auto a = run_flow("1");
  auto b = run_flow("8");
  EXPECT_EQ(a.W, b.W);
  EXPECT_EQ(a.sim.wall.wall, b.sim.wall.wall);
  ASSERT_EQ(a.sim.book.steps(), b.sim.book.steps());
  for (const auto& step : a.sim.book.steps())
    for (int p = 0; p < 4; ++p) {
      auto x = a.sim.book.step_party(step, p), y = b.sim.book.step_party(step, p);
      EXPECT_EQ(x.mults_cc, y.mults_cc);
      EXPECT_EQ(x.mults_pc, y.mults_pc);
      EXPECT_EQ(x.rotations, y.rotations);
      EXPECT_EQ(x.bootstraps, y.bootstraps);
      EXPECT_EQ(x.ciphertexts_sent, y.ciphertexts_sent);
    }
  EXPECT_EQ(a.sim.barriers.size(), b.sim.barriers.size());
}

TEST(Fedsim, SlowerNetworkStaysWithinBound) {
  // default scenario: 6 parties, 1024 rows each, 256 features, t = 8192
  std::mt19937_64 rng(5);
  Mat A = testing::random_mat(rng, 6 * 1024, 256);
  std::vector<DatasetShard> shards;
  for (int p = 0; p < 6; ++p) shards.push_back({p, A.middleRows(1024 * p, 1024)});
  PcaParams params;
  params.approx = ApproxMode::Exact;
  params.auto_intervals = false;
  CryptoParams c;
  c.ring_degree = 1 << 14;
  RuntimeProfile prof;
  NetworkModel net;
  auto sim = simulate(6, c, prof, net, [&](Backend& be) { run(be, shards, params); });
  NetworkModel slow = net;
  slow.bandwidth_bps /= 2;
  slow.latency_s *= 2;
  auto w = estimate_wall(sim.book, sim.barriers, prof, slow);
  EXPECT_GT(w.wall, sim.wall.wall);
  EXPECT_LE(w.wall / sim.wall.wall, 1.2);
}

}  // namespace
}  // namespace fedpca
