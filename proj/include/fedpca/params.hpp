// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

namespace fedpca {

struct CryptoParams {
  std::size_t ring_degree = std::size_t{1} << 14;
  int level_budget = 7;
  int scale_bits = 40;
  double noise_std = 0.0;
  double ciphertext_bytes = 2.5e6;
  std::uint64_t noise_seed = 0x5eed;

  std::size_t slot_count() const { return ring_degree / 2; }
  void validate() const;
};

// Seconds per operation; defaults are local micro-benchmark figures.
struct RuntimeProfile {
  double add = 7e-4;
  double mult_pc = 0.013;
  double mult_cc = 0.083;
  double rotate = 0.08;
  double dot = 0.73;
  double dbootstrap = 0.49;
  double send = 0.026;
  void validate() const;
};

enum class Topology { Ring, Star };

struct NetworkModel {
  double latency_s = 0.020;
  double bandwidth_bps = 1e9;
  double ciphertext_bytes = 2.5e6;
  Topology topology = Topology::Ring;
  void validate() const;
};

}  // namespace fedpca
