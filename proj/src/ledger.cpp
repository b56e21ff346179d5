// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/ledger.hpp"

#include <stdexcept>

#include "fedpca/common.hpp"

namespace fedpca {

CostLedger& CostLedger::operator+=(const CostLedger& o) {
  mults_cc += o.mults_cc;
  mults_pc += o.mults_pc;
  rotations += o.rotations;
  rotation_calls += o.rotation_calls;
  rescales += o.rescales;
  relinearizations += o.relinearizations;
  bootstraps += o.bootstraps;
  adds += o.adds;
  const_mults += o.const_mults;
  encryptions += o.encryptions;
  level_drops += o.level_drops;
  keyswitches += o.keyswitches;
  debug_reads += o.debug_reads;
  overhead_mults += o.overhead_mults;
  overhead_rotations += o.overhead_rotations;
  ciphertexts_sent += o.ciphertexts_sent;
  ciphertexts_received += o.ciphertexts_received;
  bytes_sent += o.bytes_sent;
  model_ciphertexts += o.model_ciphertexts;
  estimated_seconds += o.estimated_seconds;
  return *this;
}

CostLedger CostLedger::operator-(const CostLedger& o) const {
  CostLedger r;
  r.mults_cc = mults_cc - o.mults_cc;
  r.mults_pc = mults_pc - o.mults_pc;
  r.rotations = rotations - o.rotations;
  r.rotation_calls = rotation_calls - o.rotation_calls;
  r.rescales = rescales - o.rescales;
  r.relinearizations = relinearizations - o.relinearizations;
  r.bootstraps = bootstraps - o.bootstraps;
  r.adds = adds - o.adds;
  r.const_mults = const_mults - o.const_mults;
  r.encryptions = encryptions - o.encryptions;
  r.level_drops = level_drops - o.level_drops;
  r.keyswitches = keyswitches - o.keyswitches;
  r.debug_reads = debug_reads - o.debug_reads;
  r.overhead_mults = overhead_mults - o.overhead_mults;
  r.overhead_rotations = overhead_rotations - o.overhead_rotations;
  r.ciphertexts_sent = ciphertexts_sent - o.ciphertexts_sent;
  r.ciphertexts_received = ciphertexts_received - o.ciphertexts_received;
  r.bytes_sent = bytes_sent - o.bytes_sent;
  r.model_ciphertexts = model_ciphertexts - o.model_ciphertexts;
  r.estimated_seconds = estimated_seconds - o.estimated_seconds;
  return r;
}

double CostLedger::local_seconds(const RuntimeProfile& prof) const {
  // overhead ops are real work and are timed like the rest
  return static_cast<double>(adds) * prof.add +
         static_cast<double>(mults_pc + overhead_mults) * prof.mult_pc +
         static_cast<double>(mults_cc) * prof.mult_cc +
         static_cast<double>(rotations + overhead_rotations) * prof.rotate +
         static_cast<double>(bootstraps) * prof.dbootstrap;
}

CostLedger& LedgerBook::at(const std::string& step, int party) {
  if (party < 0 || party >= parties_) throw std::out_of_range("ledger party index");
  auto it = book_.find(step);
  if (it == book_.end()) {
    order_.push_back(step);
    it = book_.emplace(step, std::vector<CostLedger>(static_cast<std::size_t>(parties_))).first;
  }
  return it->second[static_cast<std::size_t>(party)];
}

CostLedger LedgerBook::step_party(const std::string& step, int party) const {
  auto it = book_.find(step);
  if (it == book_.end()) return {};
  return it->second.at(static_cast<std::size_t>(party));
}

CostLedger LedgerBook::party_total(int party) const {
  CostLedger r;
  for (const auto& s : order_) r += book_.at(s).at(static_cast<std::size_t>(party));
  return r;
}

CostLedger LedgerBook::step_total(const std::string& step) const {
  CostLedger r;
  auto it = book_.find(step);
  if (it == book_.end()) return r;
  for (const auto& l : it->second) r += l;
  return r;
}

}  // namespace fedpca
