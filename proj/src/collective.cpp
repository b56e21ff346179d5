// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/collective.hpp"

namespace fedpca {

namespace {

void charge_exchange(Backend& be, double sent, double received) {
  const double bytes = be.params().ciphertext_bytes;
  be.charge([&](CostLedger& l) {
    l.ciphertexts_sent += sent;
    l.ciphertexts_received += received;
    l.bytes_sent += sent * bytes;
  });
}

}  // namespace

CollectiveKeys dkeygen(Backend& be) {
  if (be.parties() < 2) throw ConfigError("collective key generation needs at least two parties");
  CollectiveKeys k;
  k.rotation_key_count = 2 * be.log_slots();
  k.relin_key_present = true;
  k.setup_comm_ciphertexts = be.log_slots() + 2.5;
  ActorScope all(be, be.all_parties());
  charge_exchange(be, k.setup_comm_ciphertexts, 0);
  be.charge_model(k.setup_comm_ciphertexts);
  be.record_barrier(BarrierKind::KeyGen, k.setup_comm_ciphertexts);
  return k;
}

namespace {

Ciphertext bootstrap_one(Backend& be, const Ciphertext& ct, bool allow_local) {
  if (ct.pending()) throw ProtocolError("bootstrap requested on a ciphertext with pending maintenance");
  if (ct.owner() != kCollectiveKey) throw ProtocolError("bootstrap needs the collective key");
  if (!ct.shared() && !allow_local) throw ProtocolError("bootstrap on data that is not globally aggregated");
  ActorScope all(be, be.all_parties());
  charge_exchange(be, 1, 1);
  be.charge([](CostLedger& l) { ++l.bootstraps; });
  return be.refreshed(ct);
}

}  // namespace

Ciphertext dbootstrap(Backend& be, const Ciphertext& ct, bool allow_local) {
  Ciphertext r = bootstrap_one(be, ct, allow_local);
  be.record_barrier(BarrierKind::Bootstrap, 1);
  return r;
}

EncMatrix dbootstrap(Backend& be, const EncMatrix& m, bool allow_local) {
  EncMatrix r = m;
  double n = 0;
  for (auto& row : r.data)
    for (auto& c : row) {
      c = bootstrap_one(be, c, allow_local);
      ++n;
    }
  if (n > 0) be.record_barrier(BarrierKind::Bootstrap, n);
  return r;
}

Ciphertext ensure_level(Backend& be, const Ciphertext& ct, int need, bool allow_local) {
  if (need > be.max_level()) throw LevelError("stage needs more levels than the budget provides");
  return ct.level() < need ? dbootstrap(be, ct, allow_local) : ct;
}

EncMatrix ensure_level(Backend& be, const EncMatrix& m, int need, bool allow_local) {
  if (need > be.max_level()) throw LevelError("stage needs more levels than the budget provides");
  return m.level() < need ? dbootstrap(be, m, allow_local) : m;
}

Ciphertext dkeyswitch(Backend& be, const Ciphertext& ct, int target) {
  if (target < 0 || target >= be.parties()) throw ConfigError("key switch target out of range");
  if (ct.pending()) throw ProtocolError("key switch on a ciphertext with pending maintenance");
  ActorScope all(be, be.all_parties());
  charge_exchange(be, 1, 0);
  be.charge([](CostLedger& l) { ++l.keyswitches; });
  be.record_barrier(BarrierKind::KeySwitch, 1);
  return be.retagged(ct, target, false);
}

std::vector<double> dkeyswitch_release(Backend& be, const Ciphertext& ct) {
  if (ct.pending()) throw ProtocolError("decryption of a ciphertext with pending maintenance");
  if (ct.owner() != kCollectiveKey) throw AccessError("collective decryption needs the collective key");
  ActorScope all(be, be.all_parties());
  charge_exchange(be, 1, 0);
  be.charge([](CostLedger& l) { ++l.keyswitches; });
  be.record_barrier(BarrierKind::KeySwitch, 1);
  return detail::SlotAccess::slots(ct);
}

Mat release_matrix(Backend& be, const EncMatrix& m) {
  const std::size_t t = be.slots();
  Mat out(static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t q = 0; q < m.blocks(); ++q) {
      auto v = dkeyswitch_release(be, m.data[i][q]);
      for (std::size_t u = 0; u < t && q * t + u < m.cols; ++u)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q * t + u)) = v[u];
    }
  return out;
}

std::vector<double> readout(const Ciphertext& ct, int party) {
  if (ct.owner() != party) throw AccessError("ciphertext is not encrypted under this party's key");
  return detail::SlotAccess::slots(ct);
}

namespace {

Ciphertext aggregate_one(Backend& be, const std::vector<Ciphertext>& per_party) {
  const int s = be.parties();
  if (static_cast<int>(per_party.size()) != s) throw ProtocolError("aggregation barrier arity mismatch");
  Ciphertext acc = per_party[0];
  for (int i = 1; i < s; ++i) {
    ActorScope one(be, {i});
    acc = be.add(acc, per_party[static_cast<std::size_t>(i)]);
  }
  ActorScope all(be, be.all_parties());
  if (be.topology == Topology::Star) {
    const double n = s - 1;
    be.charge_party(0, [&](CostLedger& l) {
      l.ciphertexts_sent += n;
      l.ciphertexts_received += n;
      l.bytes_sent += n * be.params().ciphertext_bytes;
    });
    for (int i = 1; i < s; ++i)
      be.charge_party(i, [&](CostLedger& l) {
        l.ciphertexts_sent += 1;
        l.ciphertexts_received += 1;
        l.bytes_sent += be.params().ciphertext_bytes;
      });
  } else {
    charge_exchange(be, 1, 1);
  }
  be.charge_model(1);
  return be.retagged(acc, kCollectiveKey, true);
}

}  // namespace

Ciphertext aggregate_broadcast(Backend& be, const std::vector<Ciphertext>& per_party) {
  Ciphertext r = aggregate_one(be, per_party);
  be.record_barrier(BarrierKind::Aggregate, 1);
  return r;
}

EncMatrix aggregate_broadcast(Backend& be, const std::vector<EncMatrix>& per_party) {
  if (static_cast<int>(per_party.size()) != be.parties()) throw ProtocolError("aggregation barrier arity mismatch");
  const EncMatrix& first = per_party.front();
  for (const auto& m : per_party)
    if (m.rows != first.rows || m.cols != first.cols) throw ProtocolError("aggregated matrices differ in shape");
  EncMatrix r = first;
  std::vector<Ciphertext> parts(per_party.size());
  for (std::size_t i = 0; i < first.rows; ++i)
    for (std::size_t q = 0; q < first.blocks(); ++q) {
      for (std::size_t p = 0; p < per_party.size(); ++p) parts[p] = per_party[p].data[i][q];
      r.data[i][q] = aggregate_one(be, parts);
    }
  be.record_barrier(BarrierKind::Aggregate, static_cast<double>(first.rows * first.blocks()));
  return r;
}

}  // namespace fedpca
