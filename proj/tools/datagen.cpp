// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "CLI11.hpp"
#include "fedpca/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write synthetic datasets as CSV"};
  std::string kind = "clusters", out;
  std::uint64_t seed = 1;
  std::size_t per_cluster = 100, columns = 16, clusters = 3;
  double separation = 4.0;
  app.add_option("kind", kind, "pima, wine or clusters")->check(CLI::IsMember({"pima", "wine", "clusters"}));
  app.add_option("-o,--out", out, "output CSV path")->required();
  app.add_option("--seed", seed);
  app.add_option("--per-cluster", per_cluster);
  app.add_option("--columns", columns);
  app.add_option("--clusters", clusters);
  app.add_option("--separation", separation);
  CLI11_PARSE(app, argc, argv);
  try {
    fedpca::LabeledData d;
    if (kind == "pima") {
      d = fedpca::synth_pima(seed);
    } else if (kind == "wine") {
      d = fedpca::synth_wine(seed);
    } else {
      d = fedpca::synth_clusters(per_cluster, columns, clusters, separation, seed);
    }
    fedpca::write_csv(out, d);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
