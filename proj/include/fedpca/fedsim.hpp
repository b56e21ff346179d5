// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fedpca/backend.hpp"
#include "fedpca/params.hpp"

namespace fedpca {

struct StepTiming {
  std::string step;
  double slowest_local = 0;
  double barrier = 0;
};

struct WallEstimate {
  std::vector<double> party_local;  // seconds of local work per party
  double slowest_local = 0;
  double barrier = 0;
  double wall = 0;
  std::vector<StepTiming> steps;
};

// Seconds one rendezvous takes on the network.
double barrier_seconds(const BarrierEvent& ev, const NetworkModel& net);

WallEstimate estimate_wall(const LedgerBook& book, const std::vector<BarrierEvent>& barriers,
                           const RuntimeProfile& prof, const NetworkModel& net);
WallEstimate estimate_wall(const Backend& be, const RuntimeProfile& prof, const NetworkModel& net);

// Generic rendezvous: every party sends and receives `payload` ciphertexts.
void barrier_exchange(Backend& be, BarrierKind kind, double payload);

struct SimResult {
  LedgerBook book;
  std::vector<BarrierEvent> barriers;
  WallEstimate wall;
};

SimResult simulate(int parties, const CryptoParams& crypto, const RuntimeProfile& prof, const NetworkModel& net,
                   const std::function<void(Backend&)>& program);

// Worker count from FEDPCA_THREADS, at least 1.
std::size_t worker_count();
// Runs f(0..n-1) on up to worker_count() threads; f must only touch its own slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace fedpca
