// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/fedsim.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <thread>

namespace fedpca {

void RuntimeProfile::validate() const {
  for (double v : {add, mult_pc, mult_cc, rotate, dot, dbootstrap, send})
    if (!(v >= 0)) throw ConfigError("runtime profile entries must be non-negative");
  if (!(mult_pc < mult_cc)) throw ConfigError("runtime profile needs mult_pc < mult_cc");
}

void NetworkModel::validate() const {
  if (!(latency_s > 0) || !(bandwidth_bps > 0) || !(ciphertext_bytes > 0))
    throw ConfigError("network model values must be positive");
}

double barrier_seconds(const BarrierEvent& ev, const NetworkModel& net) {
  if (ev.parties < 2 || ev.payload_ciphertexts <= 0) return 0;
  const double s = ev.parties;
  const double transfer = ev.payload_ciphertexts * net.ciphertext_bytes * 8.0 / net.bandwidth_bps;
  if (net.topology == Topology::Star) return 2.0 * (net.latency_s + (s - 1) * transfer);
  return (s - 1) * (net.latency_s + transfer);
}

WallEstimate estimate_wall(const LedgerBook& book, const std::vector<BarrierEvent>& barriers,
                           const RuntimeProfile& prof, const NetworkModel& net) {
  WallEstimate w;
  const int s = book.parties();
  w.party_local.assign(static_cast<std::size_t>(s), 0.0);
  std::map<std::string, double> step_barrier;
  for (const auto& b : barriers) {
    double sec = barrier_seconds(b, net);
    w.barrier += sec;
    step_barrier[b.step] += sec;
  }
  for (const auto& step : book.steps()) {
    StepTiming st{step, 0, step_barrier[step]};
    for (int p = 0; p < s; ++p) {
      double sec = book.step_party(step, p).local_seconds(prof);
      w.party_local[static_cast<std::size_t>(p)] += sec;
      st.slowest_local = std::max(st.slowest_local, sec);
    }
    w.steps.push_back(st);
  }
  for (const auto& [step, sec] : step_barrier)
    if (std::none_of(w.steps.begin(), w.steps.end(), [&](const StepTiming& x) { return x.step == step; }))
      w.steps.push_back({step, 0, sec});
  w.slowest_local = w.party_local.empty() ? 0 : *std::max_element(w.party_local.begin(), w.party_local.end());
  w.wall = w.slowest_local + w.barrier;
  return w;
}

WallEstimate estimate_wall(const Backend& be, const RuntimeProfile& prof, const NetworkModel& net) {
  return estimate_wall(be.book(), be.barriers(), prof, net);
}

void barrier_exchange(Backend& be, BarrierKind kind, double payload) {
  if (static_cast<int>(be.actors().size()) != be.parties())
    throw ProtocolError("barrier arity mismatch: not every party arrived");
  const double bytes = be.params().ciphertext_bytes;
  be.charge([&](CostLedger& l) {
    l.ciphertexts_sent += payload;
    l.ciphertexts_received += payload;
    l.bytes_sent += payload * bytes;
    if (kind == BarrierKind::Bootstrap) l.bootstraps += static_cast<std::uint64_t>(payload);
    if (kind == BarrierKind::KeySwitch) l.keyswitches += static_cast<std::uint64_t>(payload);
  });
  be.record_barrier(kind, payload);
}

SimResult simulate(int parties, const CryptoParams& crypto, const RuntimeProfile& prof, const NetworkModel& net,
                   const std::function<void(Backend&)>& program) {
  prof.validate();
  net.validate();
  Backend be(crypto, parties);
  be.topology = net.topology;
  program(be);
  return {be.book(), be.barriers(), estimate_wall(be, prof, net)};
}

std::size_t worker_count() {
  const char* env = std::getenv("FEDPCA_THREADS");
  if (env != nullptr) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace fedpca
