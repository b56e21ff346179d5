// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "fedpca/cli.hpp"
#include "fedpca/synth.hpp"

namespace fs = std::filesystem;
using namespace fedpca;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("fedpca_cli_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string file(const std::string& name, const std::string& body) const {
    std::ofstream f(path_ / name, std::ios::binary);
    f << body;
    return (path_ / name).string();
  }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

// Four clusters, rows shuffled so every party sees all of them.
std::string write_toy(const TempDir& dir) {
  LabeledData d = synth_clusters(50, 16, 4, 4.0, 11);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d.X.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(5);
  std::shuffle(order.begin(), order.end(), rng);
  LabeledData s = d;
  for (std::size_t i = 0; i < order.size(); ++i) {
    s.X.row(static_cast<Eigen::Index>(i)) = d.X.row(order[i]);
    s.labels[i] = d.labels[static_cast<std::size_t>(order[i])];
  }
  const std::string path = dir.str() + "/toy.csv";
  write_csv(path, s);
  return path;
}

RunConfig toy_config(const TempDir& dir) {
  nlohmann::json j = {{"dataset", write_toy(dir)},
                      {"label_column", "label"},
                      {"parties", 3},
                      {"seed", 7},
                      {"pca", {{"num_pcs", 2}, {"oversampling", 2}, {"power_iterations", 3}, {"eigen_iterations", 5}}}};
  return parse_config(j, dir.str());
}

}  // namespace

TEST(Ingest, HeaderAndLabelColumn) {
  TempDir dir;
  Table t = read_table(dir.file("a.csv", "a,b,kind\n1,2,x\n3,4.5,y\n"), std::string("kind"));
  EXPECT_TRUE(t.had_header);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.labels, (std::vector<std::string>{"x", "y"}));
  EXPECT_DOUBLE_EQ(t.X(1, 1), 4.5);
}

TEST(Ingest, HeaderlessFileAndIndexLabel) {
  TempDir dir;
  Table t = read_table(dir.file("a.csv", "1,2,0\n3,4,1\n\n"), std::string("2"));
  EXPECT_FALSE(t.had_header);
  EXPECT_EQ(t.X.rows(), 2);
  EXPECT_EQ(t.X.cols(), 2);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(ingest(dir.file("b.csv", "1,-2e3\n")).coeff(0, 1), -2000.0);
}

TEST(Ingest, MalformedInputs) {
  TempDir dir;
  EXPECT_THROW(read_table(dir.file("a.csv", "")), DataError);
  EXPECT_THROW(read_table(dir.file("b.csv", "a,b\n1,2\n3\n")), DataError);
  EXPECT_THROW(read_table(dir.file("c.csv", "a,b\n1,2\n3,zz\n")), DataError);
  EXPECT_THROW(read_table(dir.file("d.csv", "a,b\n")), DataError);
  EXPECT_THROW(read_table(dir.file("e.csv", "a,b\n1,2\n"), std::string("nope")), DataError);
  EXPECT_THROW(read_table(dir.str() + "/missing.csv"), DataError);
  try {
    read_table(dir.file("f.csv", "a,b\n1,2\n3,zz\n"));
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(Ingest, FormatDoubleRoundTrips) {
  for (double x : {0.1, -1e-300, 123456789.125, 1.0 / 3.0}) EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Partition, EvenSplitPutsRemainderFirst) {
  Mat A = Mat::Zero(10, 2);
  auto parts = partition(A, {}, 3);
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0].size(), 4u);
  EXPECT_EQ(parts[1].size(), 3u);
  EXPECT_EQ(parts[2].size(), 3u);
  EXPECT_EQ(parts[1].front(), 4);
  EXPECT_THROW(partition(A, {}, 11), ConfigError);
}

TEST(Partition, ByRowsAndByLabel) {
  Mat A = Mat::Zero(5, 2);
  auto rows = partition(A, {PartitionKind::ByRows, {1, 4}}, 2);
  EXPECT_EQ(rows[1], (std::vector<Eigen::Index>{1, 2, 3, 4}));
  EXPECT_THROW(partition(A, {PartitionKind::ByRows, {2, 2}}, 2), ConfigError);
  EXPECT_THROW(partition(A, {PartitionKind::ByRows, {0, 5}}, 2), ConfigError);

  std::vector<std::string> labels{"b", "a", "b", "a", "b"};
  auto by = partition(A, {PartitionKind::ByLabel, {}}, 2, labels);
  EXPECT_EQ(by[0], (std::vector<Eigen::Index>{0, 2, 4}));
  EXPECT_EQ(by[1], (std::vector<Eigen::Index>{1, 3}));
  EXPECT_THROW(partition(A, {PartitionKind::ByLabel, {}}, 3, labels), ConfigError);
}

TEST(Config, RejectsBadInput) {
  TempDir dir;
  const std::string csv = dir.file("d.csv", "1,2\n3,4\n5,6\n");
  nlohmann::json ok = {{"dataset", csv}, {"parties", 2}};
  EXPECT_NO_THROW(parse_config(ok, dir.str()).validate());

  auto with = [&](const std::string& key, nlohmann::json v) {
    nlohmann::json j = ok;
    j[key] = std::move(v);
    return j;
  };
  EXPECT_THROW(parse_config(with("bogus", 1), dir.str()), ConfigError);
  EXPECT_THROW(parse_config(with("parties", "two"), dir.str()), ConfigError);
  EXPECT_THROW(parse_config(with("mode", "fast"), dir.str()), ConfigError);
  EXPECT_THROW(parse_config(with("pca", {{"strategy", "greedy"}}), dir.str()), ConfigError);
  EXPECT_THROW(parse_config(with("pca", {{"intervals", {{"nowhere", {{"lo", 0}}}}}}), dir.str()), ConfigError);
  EXPECT_THROW(parse_config(with("network", {{"topology", "mesh"}}), dir.str()), ConfigError);
  EXPECT_THROW(parse_config(with("parties", 1), dir.str()).validate(), ConfigError);
  EXPECT_NO_THROW(parse_config(with("mode", "oracle"), dir.str()).validate());
  EXPECT_THROW(parse_config(with("dataset", "missing.csv"), dir.str()).validate(), ConfigError);
  EXPECT_THROW(parse_config(with("partition", "by_label"), dir.str()).validate(), ConfigError);
  EXPECT_THROW(load_config(dir.file("bad.json", "{not json")), ConfigError);
}

TEST(Config, RelativePathsAndSeed) {
  TempDir dir;
  dir.file("d.csv", "1,2\n3,4\n");
  RunConfig c = load_config(dir.file("c.json", R"({"dataset":"d.csv","seed":9,"out":"res"})"));
  EXPECT_EQ(fs::path(c.dataset_path), fs::path(dir.str()) / "d.csv");
  EXPECT_EQ(fs::path(c.out_dir), fs::path(dir.str()) / "res");
  EXPECT_EQ(c.pca.sketch_seed, 9u);
  EXPECT_EQ(c.crypto.noise_seed, 9u);
  EXPECT_EQ(c.pca.approx, ApproxMode::Exact);
}

TEST(Errors, ExitCodes) {
  auto code = [](auto thrower) {
    try {
      thrower();
    } catch (...) {
      return classify_current_exception().code;
    }
    return kExitOk;
  };
  EXPECT_EQ(code([] { throw ConfigError("x"); }), kExitConfig);
  EXPECT_EQ(code([] { throw DataError("x"); }), kExitData);
  EXPECT_EQ(code([] { throw LevelError("x"); }), kExitRuntime);
  EXPECT_EQ(code([] { throw NumericError("x"); }), kExitRuntime);
  EXPECT_EQ(code([] { throw std::runtime_error("x"); }), kExitInternal);
  auto err = nlohmann::json::parse(CliError{kExitData, "data", "bad row"}.json());
  EXPECT_EQ(err["error"]["code"], kExitData);
  EXPECT_EQ(err["error"]["message"], "bad row");
}

TEST(EndToEnd, ToyMatchesOracleAndIsReproducible) {
  TempDir dir;
  RunConfig cfg = toy_config(dir);
  RunArtifacts a = run_config(cfg);
  const auto& rep = a.report;
  EXPECT_GE(rep["federated"]["metrics"]["vs_oracle"]["r2_mean"].get<double>(), 0.99);
  EXPECT_GE(rep["federated"]["metrics"]["vs_exact"]["r2_mean"].get<double>(), 0.99);
  EXPECT_TRUE(rep["federated"]["ledger"]["comm_matches_formula"].get<bool>());
  EXPECT_EQ(rep["partition"]["sizes"], nlohmann::json({67, 67, 66}));
  for (const char* f : {"report.json", "plot_federated.csv", "plot_oracle.csv", "plot_meta.csv"})
    EXPECT_TRUE(a.files.count(f)) << f;

  const std::string out1 = dir.str() + "/r1", out2 = dir.str() + "/r2";
  write_artifacts(a, out1);
  write_artifacts(run_config(cfg), out2);
  for (const auto& [name, body] : a.files) EXPECT_EQ(slurp(out1 + "/" + name), slurp(out2 + "/" + name)) << name;
  std::string plot = slurp(out1 + "/plot_federated.csv");
  EXPECT_EQ(plot.substr(0, plot.find('\n')), "pc1,pc2,label");
  EXPECT_EQ(std::count(plot.begin(), plot.end(), '\n'), 201);
}

TEST(EndToEnd, SingleOversampledComponentOnSeq) {
  TempDir dir;
  RunConfig cfg = toy_config(dir);
  cfg.pca.psi = 1;
  cfg.pca.alpha = 1;
  cfg.pca.strategy = Strategy::Seq;
  cfg.mode = RunMode::Federated;
  RunArtifacts a = run_config(cfg);
  EXPECT_GE(a.report["federated"]["metrics"]["vs_oracle"]["r2_mean"].get<double>(), 0.99);
  EXPECT_FALSE(a.files.count("plot_meta.csv"));
}
