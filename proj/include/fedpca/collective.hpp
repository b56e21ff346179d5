// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fedpca/backend.hpp"
#include "fedpca/encmat.hpp"

namespace fedpca {

struct CollectiveKeys {
  int rotation_key_count = 0;
  bool relin_key_present = false;
  double setup_comm_ciphertexts = 0;
};

CollectiveKeys dkeygen(Backend& be);

// Level back to the budget. Local (non-aggregated) inputs are refused unless allowed.
Ciphertext dbootstrap(Backend& be, const Ciphertext& ct, bool allow_local = false);
EncMatrix dbootstrap(Backend& be, const EncMatrix& m, bool allow_local = false);
// bootstrap only when fewer than `need` levels remain
Ciphertext ensure_level(Backend& be, const Ciphertext& ct, int need, bool allow_local = false);
EncMatrix ensure_level(Backend& be, const EncMatrix& m, int need, bool allow_local = false);

// Re-encrypt under a party key.
Ciphertext dkeyswitch(Backend& be, const Ciphertext& ct, int target);
// Collective decryption: plaintext released to every party.
std::vector<double> dkeyswitch_release(Backend& be, const Ciphertext& ct);
Mat release_matrix(Backend& be, const EncMatrix& m);
// Readout by the party holding the key.
std::vector<double> readout(const Ciphertext& ct, int party);

Ciphertext aggregate_broadcast(Backend& be, const std::vector<Ciphertext>& per_party);
EncMatrix aggregate_broadcast(Backend& be, const std::vector<EncMatrix>& per_party);

}  // namespace fedpca
