// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shadow readout for tests and tooling. Protocol code does not include this.

#include <vector>

#include "fedpca/backend.hpp"

namespace fedpca {

std::vector<double> debug_decrypt(Backend& be, const Ciphertext& c);

}  // namespace fedpca
