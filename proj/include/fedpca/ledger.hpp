// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fedpca/params.hpp"

namespace fedpca {

struct CostLedger {
  std::uint64_t mults_cc = 0;
  std::uint64_t mults_pc = 0;
  std::uint64_t rotations = 0;       // elementary power-of-two shifts
  std::uint64_t rotation_calls = 0;  // rotate invocations with nonzero shift
  std::uint64_t rescales = 0;
  std::uint64_t relinearizations = 0;
  std::uint64_t bootstraps = 0;
  std::uint64_t adds = 0;
  std::uint64_t const_mults = 0;
  std::uint64_t encryptions = 0;
  std::uint64_t level_drops = 0;
  std::uint64_t keyswitches = 0;
  std::uint64_t debug_reads = 0;
  // element extraction work that the closed-form cost lines leave out
  std::uint64_t overhead_mults = 0;
  std::uint64_t overhead_rotations = 0;
  double ciphertexts_sent = 0;
  double ciphertexts_received = 0;
  double bytes_sent = 0;
  // communication as the closed-form per-routine accounting counts it
  double model_ciphertexts = 0;
  double estimated_seconds = 0;

  std::uint64_t mults() const { return mults_cc + mults_pc; }
  CostLedger& operator+=(const CostLedger& o);
  CostLedger operator-(const CostLedger& o) const;
  double local_seconds(const RuntimeProfile& prof) const;
};

// Ledgers per (step label, party), steps kept in first-use order.
class LedgerBook {
 public:
  explicit LedgerBook(int parties = 1) : parties_(parties) {}

  int parties() const { return parties_; }
  CostLedger& at(const std::string& step, int party);
  const std::vector<std::string>& steps() const { return order_; }
  CostLedger step_party(const std::string& step, int party) const;
  CostLedger party_total(int party) const;
  // sum over parties of one step
  CostLedger step_total(const std::string& step) const;

 private:
  int parties_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<CostLedger>> book_;
};

}  // namespace fedpca
