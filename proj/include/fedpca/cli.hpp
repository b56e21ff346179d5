// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fedpca/params.hpp"
#include "fedpca/pca_params.hpp"
#include "fedpca/textio.hpp"

namespace fedpca {

using ordered_json = nlohmann::ordered_json;

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PartitionKind { Even, ByRows, ByLabel };

struct PartitionSpec {
  PartitionKind kind = PartitionKind::Even;
  std::vector<std::size_t> sizes;  // by_rows only
};

enum class RunMode { Federated, Oracle, Meta, All };
std::string mode_name(RunMode m);
RunMode parse_mode(const std::string& s);

struct RunConfig {
  std::string dataset;       // as written in the config
  std::string dataset_path;  // resolved against the config's directory
  std::optional<std::string> label_column;
  PartitionSpec partition;
  int parties = 6;
  PcaParams pca;  // parse_config defaults approx to exact
  std::size_t meta_local_rank = 0;  // 0: psi + alpha
  CryptoParams crypto;
  NetworkModel network;
  RuntimeProfile profile;
  RunMode mode = RunMode::All;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  void validate() const;
};

// Unknown keys are rejected. Relative paths resolve against base_dir.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir);
RunConfig load_config(const std::string& path);
ordered_json config_json(const RunConfig& c);

// Row index sets, one per party; rows keep their file order within a shard.
std::vector<std::vector<Eigen::Index>> partition(const Mat& A, const PartitionSpec& spec, int parties,
                                                 const std::vector<std::string>& labels = {});

struct RunArtifacts {
  ordered_json report;
  std::map<std::string, std::string> files;  // file name -> contents, report included
};

RunArtifacts run_config(const RunConfig& cfg);
void write_artifacts(const RunArtifacts& a, const std::string& out_dir);

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

struct CliError {
  int code = kExitInternal;
  std::string kind;
  std::string message;
  std::string json() const;
};
// Maps the active exception to an exit code and an error record.
CliError classify_current_exception();

}  // namespace fedpca
