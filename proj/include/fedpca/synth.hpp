// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedpca/common.hpp"

namespace fedpca {

struct LabeledData {
  Mat X;
  std::vector<std::string> columns;
  std::vector<std::string> labels;  // empty when unlabeled
};

// Correlated tabular data shaped like the diabetes table (767 x 8).
LabeledData synth_pima(std::uint64_t seed);
// Correlated tabular data shaped like the white-wine table (4898 x 11).
LabeledData synth_wine(std::uint64_t seed);
// Isotropic Gaussian clusters with centers along the first axes, labeled c0, c1, ...
LabeledData synth_clusters(std::size_t per_cluster, std::size_t m, std::size_t clusters, double separation,
                           std::uint64_t seed);

void write_csv(const std::string& path, const LabeledData& d);

}  // namespace fedpca
