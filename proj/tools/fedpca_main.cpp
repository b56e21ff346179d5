// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "fedpca/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Federated randomized PCA over a simulated encrypted backend"};
  std::string config_path, mode, out, strategy;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise_std;
  std::optional<int> parties;
  app.add_option("-c,--config", config_path, "JSON run configuration")->required();
  app.add_option("--mode", mode, "federated, oracle, meta or all");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "sketch and noise seed");
  app.add_option("--strategy", strategy, "auto, precomp or seq");
  app.add_option("--noise-std", noise_std, "standard deviation of the decryption noise");
  app.add_option("--parties", parties, "number of parties");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    fedpca::CliError err{fedpca::kExitConfig, "usage", e.what()};
    std::cerr << err.json() << "\n";
    return err.code;
  }

  try {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) throw fedpca::ConfigError("cannot open config: " + config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw fedpca::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw fedpca::ConfigError("config must be a JSON object");
    if (!mode.empty()) j["mode"] = mode;
    if (seed) j["seed"] = *seed;
    if (!strategy.empty()) j["pca"]["strategy"] = strategy;
    if (noise_std) j["crypto"]["noise_std"] = *noise_std;
    if (parties) j["parties"] = *parties;
    const std::string base = std::filesystem::path(config_path).parent_path().string();
    fedpca::RunConfig cfg = fedpca::parse_config(j, base);
    if (!out.empty()) cfg.out_dir = out;
    fedpca::RunArtifacts art = fedpca::run_config(cfg);
    fedpca::write_artifacts(art, cfg.out_dir);
    const auto& rep = art.report;
    std::cout << "wrote " << cfg.out_dir << "/report.json\n";
    if (rep.contains("federated")) {
      const auto& fed = rep["federated"];
      std::cout << "federated: strategy " << fed["strategy"].get<std::string>() << ", r2 vs oracle "
                << fed["metrics"]["vs_oracle"]["r2_mean"].dump() << ", r2 vs exact "
                << fed["metrics"]["vs_exact"]["r2_mean"].dump() << ", estimated wall "
                << fed["wall_estimate"]["wall_s"].dump() << " s\n";
    }
    if (rep.contains("meta"))
      std::cout << "meta: r2 vs exact " << rep["meta"]["metrics"]["vs_exact"]["r2_mean"].dump() << "\n";
    return fedpca::kExitOk;
  } catch (...) {
    fedpca::CliError err = fedpca::classify_current_exception();
    std::cerr << err.json() << "\n";
    return err.code;
  }
}
