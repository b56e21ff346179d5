// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/cli.hpp"

#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "fedpca/fedsim.hpp"
#include "fedpca/oracle.hpp"
#include "fedpca/pca_flow.hpp"

namespace fedpca {

namespace fs = std::filesystem;
using nlohmann::json;

std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::Federated: return "federated";
    case RunMode::Oracle: return "oracle";
    case RunMode::Meta: return "meta";
    case RunMode::All: return "all";
  }
  return "all";
}

RunMode parse_mode(const std::string& s) {
  if (s == "federated") return RunMode::Federated;
  if (s == "oracle") return RunMode::Oracle;
  if (s == "meta") return RunMode::Meta;
  if (s == "all") return RunMode::All;
  throw ConfigError("unknown mode: " + s);
}

namespace {

bool runs_federated(RunMode m) { return m == RunMode::Federated || m == RunMode::All; }
bool runs_meta(RunMode m) { return m == RunMode::Meta || m == RunMode::All; }

std::string approx_name(ApproxMode m) { return m == ApproxMode::Exact ? "exact" : "chebyshev"; }

ApproxMode parse_approx(const std::string& s) {
  if (s == "exact") return ApproxMode::Exact;
  if (s == "chebyshev") return ApproxMode::Chebyshev;
  throw ConfigError("unknown approximation mode: " + s);
}

std::string partition_name(PartitionKind k) {
  switch (k) {
    case PartitionKind::Even: return "even";
    case PartitionKind::ByRows: return "by_rows";
    case PartitionKind::ByLabel: return "by_label";
  }
  return "even";
}

PartitionKind parse_partition(const std::string& s) {
  if (s == "even") return PartitionKind::Even;
  if (s == "by_rows") return PartitionKind::ByRows;
  if (s == "by_label") return PartitionKind::ByLabel;
  throw ConfigError("unknown partition kind: " + s);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key " + where + "." + it.key());
  }
}

template <class T>
void read(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

ApproxSpec read_spec(const json& j, ApproxSpec base, const std::string& where) {
  check_keys(j, {"lo", "hi", "degree", "min_magnitude"}, where);
  read(j, "lo", base.lo, where);
  read(j, "hi", base.hi, where);
  read(j, "degree", base.degree, where);
  read(j, "min_magnitude", base.min_magnitude, where);
  return base;
}

void read_pca(const json& j, RunConfig& c) {
  const std::string w = "pca";
  check_keys(j,
             {"power_iterations", "eigen_iterations", "num_pcs", "oversampling", "network_factor", "strategy", "approx",
              "auto_intervals", "interval_factor", "degree", "intervals", "meta_local_rank"},
             w);
  PcaParams& p = c.pca;
  read(j, "power_iterations", p.p, w);
  read(j, "eigen_iterations", p.w, w);
  read(j, "num_pcs", p.psi, w);
  read(j, "oversampling", p.alpha, w);
  read(j, "network_factor", p.xi, w);
  read(j, "auto_intervals", p.auto_intervals, w);
  read(j, "interval_factor", p.interval_factor, w);
  read(j, "meta_local_rank", c.meta_local_rank, w);
  std::string s;
  if (j.contains("strategy")) {
    read(j, "strategy", s, w);
    p.strategy = parse_strategy(s);
  }
  if (j.contains("approx")) {
    read(j, "approx", s, w);
    p.approx = parse_approx(s);
  }
  if (j.contains("degree")) {
    int d = 31;
    read(j, "degree", d, w);
    for (auto [site, spec] : p.specs.by_site()) {
      spec.degree = d;
      p.specs.set_site(site, spec);
    }
  }
  if (j.contains("intervals")) {
    const json& iv = j.at("intervals");
    if (!iv.is_object()) throw ConfigError("pca.intervals must be an object");
    const auto sites = p.specs.by_site();
    for (auto it = iv.begin(); it != iv.end(); ++it) {
      auto found = sites.find(it.key());
      if (found == sites.end()) throw ConfigError("unknown approximation call site: " + it.key());
      p.specs.set_site(it.key(), read_spec(it.value(), found->second, "pca.intervals." + it.key()));
    }
  }
}

void read_crypto(const json& j, RunConfig& c) {
  check_keys(j, {"ring_degree", "level_budget", "scale_bits", "noise_std"}, "crypto");
  read(j, "ring_degree", c.crypto.ring_degree, "crypto");
  read(j, "level_budget", c.crypto.level_budget, "crypto");
  read(j, "scale_bits", c.crypto.scale_bits, "crypto");
  read(j, "noise_std", c.crypto.noise_std, "crypto");
}

void read_network(const json& j, RunConfig& c) {
  check_keys(j, {"latency_s", "bandwidth_bps", "ciphertext_bytes", "topology"}, "network");
  read(j, "latency_s", c.network.latency_s, "network");
  read(j, "bandwidth_bps", c.network.bandwidth_bps, "network");
  read(j, "ciphertext_bytes", c.network.ciphertext_bytes, "network");
  if (j.contains("topology")) {
    std::string t;
    read(j, "topology", t, "network");
    if (t == "ring") {
      c.network.topology = Topology::Ring;
    } else if (t == "star") {
      c.network.topology = Topology::Star;
    } else {
      throw ConfigError("unknown topology: " + t);
    }
  }
}

void read_profile(const json& j, RunConfig& c) {
  const std::string w = "profile";
  check_keys(j, {"add", "mult_pc", "mult_cc", "rotate", "dot", "dbootstrap", "send"}, w);
  RuntimeProfile& p = c.profile;
  read(j, "add", p.add, w);
  read(j, "mult_pc", p.mult_pc, w);
  read(j, "mult_cc", p.mult_cc, w);
  read(j, "rotate", p.rotate, w);
  read(j, "dot", p.dot, w);
  read(j, "dbootstrap", p.dbootstrap, w);
  read(j, "send", p.send, w);
}

ordered_json spec_json(const ApproxSpec& s) {
  ordered_json j;
  j["lo"] = s.lo;
  j["hi"] = s.hi;
  j["degree"] = s.degree;
  j["min_magnitude"] = s.min_magnitude;
  return j;
}

ordered_json specs_json(const LinalgSpecs& specs) {
  ordered_json j = ordered_json::object();
  for (const auto& [site, s] : specs.by_site()) j[site] = spec_json(s);
  return j;
}

ordered_json matrix_json(const Mat& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) r.push_back(M(i, k));
    rows.push_back(r);
  }
  return rows;
}

ordered_json metrics_json(const Metrics& m) {
  ordered_json j;
  j["mse"] = m.mse;
  j["r2"] = m.r2;
  j["r2_mean"] = m.r2_mean;
  j["principal_angles"] = m.principal_angles;
  return j;
}

ordered_json ledger_json(const CostLedger& l, const RuntimeProfile& prof) {
  ordered_json j;
  j["mults_cc"] = l.mults_cc;
  j["mults_pc"] = l.mults_pc;
  j["rotations"] = l.rotations;
  j["rescales"] = l.rescales;
  j["relinearizations"] = l.relinearizations;
  j["bootstraps"] = l.bootstraps;
  j["adds"] = l.adds;
  j["encryptions"] = l.encryptions;
  j["keyswitches"] = l.keyswitches;
  j["overhead_mults"] = l.overhead_mults;
  j["overhead_rotations"] = l.overhead_rotations;
  j["ciphertexts_sent"] = l.ciphertexts_sent;
  j["ciphertexts_received"] = l.ciphertexts_received;
  j["bytes_sent"] = l.bytes_sent;
  j["model_comm"] = l.model_ciphertexts;
  j["local_seconds"] = l.local_seconds(prof);
  return j;
}

ordered_json wall_json(const WallEstimate& w) {
  ordered_json j;
  j["wall_s"] = w.wall;
  j["slowest_local_s"] = w.slowest_local;
  j["barrier_s"] = w.barrier;
  j["party_local_s"] = w.party_local;
  ordered_json steps = ordered_json::array();
  for (const auto& s : w.steps) {
    ordered_json e;
    e["step"] = s.step;
    e["slowest_local_s"] = s.slowest_local;
    e["barrier_s"] = s.barrier;
    steps.push_back(e);
  }
  j["steps"] = steps;
  return j;
}

std::string plot_csv(const Mat& P, const std::vector<std::string>& labels) {
  std::string out;
  for (Eigen::Index k = 0; k < P.cols(); ++k) out += (k ? ",pc" : "pc") + std::to_string(k + 1);
  if (!labels.empty()) out += ",label";
  out += "\n";
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    for (Eigen::Index k = 0; k < P.cols(); ++k) out += (k ? "," : "") + format_double(P(i, k));
    if (!labels.empty()) out += "," + labels[static_cast<std::size_t>(i)];
    out += "\n";
  }
  return out;
}

Mat take_rows(const Mat& A, const std::vector<Eigen::Index>& idx) {
  Mat out(static_cast<Eigen::Index>(idx.size()), A.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = A.row(idx[r]);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (dataset.empty()) throw ConfigError("dataset path is required");
  if (!fs::is_regular_file(dataset_path)) throw ConfigError("dataset file does not exist: " + dataset_path);
  if (parties < 1) throw ConfigError("parties must be >= 1");
  if (runs_federated(mode) && parties < 2) throw ConfigError("federated mode needs at least two parties");
  if (partition.kind == PartitionKind::ByLabel && !label_column)
    throw ConfigError("by_label partition needs a label_column");
  if (partition.kind == PartitionKind::ByRows && partition.sizes.size() != static_cast<std::size_t>(parties))
    throw ConfigError("by_rows partition needs one size per party");
  if (pca.psi == 0) throw ConfigError("num_pcs must be positive");
  if (!(pca.interval_factor >= 1)) throw ConfigError("interval factor must be >= 1");
  pca.specs.validate();
  crypto.validate();
  network.validate();
  profile.validate();
}

RunConfig parse_config(const json& j, const std::string& base_dir) {
  check_keys(j,
             {"dataset", "label_column", "parties", "partition", "mode", "seed", "out", "pca", "crypto", "network",
              "profile"},
             "config");
  RunConfig c;
  c.pca.approx = ApproxMode::Exact;
  read(j, "dataset", c.dataset, "config");
  if (c.dataset.empty()) throw ConfigError("config.dataset is required");
  fs::path dp(c.dataset);
  c.dataset_path = (dp.is_absolute() ? dp : fs::path(base_dir) / dp).lexically_normal().string();
  if (j.contains("label_column") && !j.at("label_column").is_null()) {
    const json& l = j.at("label_column");
    if (l.is_string()) {
      c.label_column = l.get<std::string>();
    } else if (l.is_number_unsigned()) {
      c.label_column = std::to_string(l.get<std::size_t>());
    } else {
      throw ConfigError("config.label_column must be a column name or a non-negative index");
    }
  }
  read(j, "parties", c.parties, "config");
  if (j.contains("partition")) {
    const json& p = j.at("partition");
    if (p.is_string()) {
      c.partition.kind = parse_partition(p.get<std::string>());
    } else {
      check_keys(p, {"kind", "sizes"}, "partition");
      std::string kind = "even";
      read(p, "kind", kind, "partition");
      c.partition.kind = parse_partition(kind);
      read(p, "sizes", c.partition.sizes, "partition");
    }
  }
  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", m, "config");
    c.mode = parse_mode(m);
  }
  read(j, "seed", c.seed, "config");
  c.pca.sketch_seed = c.seed;
  c.crypto.noise_seed = c.seed;
  std::string out = c.out_dir;
  read(j, "out", out, "config");
  fs::path op(out);
  c.out_dir = (op.is_absolute() ? op : fs::path(base_dir) / op).lexically_normal().string();
  if (j.contains("pca")) read_pca(j.at("pca"), c);
  if (j.contains("crypto")) read_crypto(j.at("crypto"), c);
  if (j.contains("network")) read_network(j.at("network"), c);
  c.crypto.ciphertext_bytes = c.network.ciphertext_bytes;
  if (j.contains("profile")) read_profile(j.at("profile"), c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c = parse_config(j, fs::path(path).parent_path().string());
  return c;
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["dataset"] = c.dataset;
  j["label_column"] = c.label_column ? ordered_json(*c.label_column) : ordered_json(nullptr);
  j["parties"] = c.parties;
  ordered_json part;
  part["kind"] = partition_name(c.partition.kind);
  if (c.partition.kind == PartitionKind::ByRows) part["sizes"] = c.partition.sizes;
  j["partition"] = part;
  j["mode"] = mode_name(c.mode);
  j["seed"] = c.seed;
  ordered_json pca;
  pca["power_iterations"] = c.pca.p;
  pca["eigen_iterations"] = c.pca.w;
  pca["num_pcs"] = c.pca.psi;
  pca["oversampling"] = c.pca.alpha;
  pca["components"] = c.pca.rho();
  pca["network_factor"] = c.pca.xi;
  pca["strategy"] = strategy_name(c.pca.strategy);
  pca["approx"] = approx_name(c.pca.approx);
  pca["auto_intervals"] = c.pca.auto_intervals;
  pca["interval_factor"] = c.pca.interval_factor;
  pca["meta_local_rank"] = c.meta_local_rank == 0 ? c.pca.rho() : c.meta_local_rank;
  j["pca"] = pca;
  ordered_json cr;
  cr["ring_degree"] = c.crypto.ring_degree;
  cr["slots"] = c.crypto.slot_count();
  cr["level_budget"] = c.crypto.level_budget;
  cr["scale_bits"] = c.crypto.scale_bits;
  cr["noise_std"] = c.crypto.noise_std;
  j["crypto"] = cr;
  ordered_json net;
  net["latency_s"] = c.network.latency_s;
  net["bandwidth_bps"] = c.network.bandwidth_bps;
  net["ciphertext_bytes"] = c.network.ciphertext_bytes;
  net["topology"] = c.network.topology == Topology::Ring ? "ring" : "star";
  j["network"] = net;
  ordered_json pr;
  pr["add"] = c.profile.add;
  pr["mult_pc"] = c.profile.mult_pc;
  pr["mult_cc"] = c.profile.mult_cc;
  pr["rotate"] = c.profile.rotate;
  pr["dot"] = c.profile.dot;
  pr["dbootstrap"] = c.profile.dbootstrap;
  pr["send"] = c.profile.send;
  j["profile"] = pr;
  return j;
}

std::vector<std::vector<Eigen::Index>> partition(const Mat& A, const PartitionSpec& spec, int parties,
                                                 const std::vector<std::string>& labels) {
  const auto n = static_cast<std::size_t>(A.rows());
  if (parties < 1) throw ConfigError("parties must be >= 1");
  const auto s = static_cast<std::size_t>(parties);
  if (s > n) throw ConfigError("more parties than rows");
  std::vector<std::vector<Eigen::Index>> out(s);
  auto contiguous = [&](const std::vector<std::size_t>& sizes) {
    Eigen::Index r = 0;
    for (std::size_t p = 0; p < s; ++p)
      for (std::size_t k = 0; k < sizes[p]; ++k) out[p].push_back(r++);
  };
  switch (spec.kind) {
    case PartitionKind::Even: {
      std::vector<std::size_t> sizes(s, n / s);
      for (std::size_t p = 0; p < n % s; ++p) ++sizes[p];
      contiguous(sizes);
      break;
    }
    case PartitionKind::ByRows: {
      if (spec.sizes.size() != s) throw ConfigError("by_rows partition needs one size per party");
      for (std::size_t v : spec.sizes)
        if (v == 0) throw ConfigError("by_rows partition sizes must be positive");
      if (std::accumulate(spec.sizes.begin(), spec.sizes.end(), std::size_t{0}) != n)
        throw ConfigError("by_rows partition sizes must sum to the row count");
      contiguous(spec.sizes);
      break;
    }
    case PartitionKind::ByLabel: {
      if (labels.size() != n) throw ConfigError("by_label partition needs a label for every row");
      std::vector<std::string> order;
      for (const auto& l : labels)
        if (std::find(order.begin(), order.end(), l) == order.end()) order.push_back(l);
      if (order.size() != s)
        throw ConfigError("by_label partition found " + std::to_string(order.size()) + " labels for " +
                          std::to_string(s) + " parties");
      for (std::size_t i = 0; i < n; ++i) {
        auto p = static_cast<std::size_t>(std::find(order.begin(), order.end(), labels[i]) - order.begin());
        out[p].push_back(static_cast<Eigen::Index>(i));
      }
      break;
    }
  }
  return out;
}

RunArtifacts run_config(const RunConfig& cfg) {
  cfg.validate();
  Table table = read_table(cfg.dataset_path, cfg.label_column);
  const Mat& A = table.X;
  const auto n = static_cast<std::size_t>(A.rows()), m = static_cast<std::size_t>(A.cols());
  cfg.pca.validate(n, m);
  auto parts = partition(A, cfg.partition, cfg.parties, table.labels);
  std::vector<DatasetShard> shards;
  std::size_t n_max = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    shards.push_back({static_cast<int>(p), take_rows(A, parts[p])});
    n_max = std::max(n_max, parts[p].size());
  }

  // the oracle follows the path the federated run resolves to
  PcaParams pca = cfg.pca;
  const std::size_t t = cfg.crypto.slot_count();
  RpcaPath path;
  path.strategy =
      pca.strategy == Strategy::Auto ? select_strategy(m, n_max, pca.rho(), t, cfg.profile) : pca.strategy;
  path.variant = path.strategy == Strategy::Seq ? choose_qr(n_max, m, pca.xi) : QrVariant::QR;

  RunArtifacts art;
  ordered_json& rep = art.report;
  rep["format"] = "fedpca-report/1";
  rep["config"] = config_json(cfg);
  ordered_json ds;
  ds["rows"] = n;
  ds["columns"] = m;
  ds["feature_names"] = table.columns;
  ds["header"] = table.had_header;
  if (!table.labels.empty()) {
    std::set<std::string> classes(table.labels.begin(), table.labels.end());
    ds["classes"] = classes.size();
  }
  rep["dataset"] = ds;
  ordered_json pj;
  pj["kind"] = partition_name(cfg.partition.kind);
  std::vector<std::size_t> sizes;
  for (const auto& p : parts) sizes.push_back(p.size());
  pj["sizes"] = sizes;
  rep["partition"] = pj;

  const Mat exact = pca_exact(A, pca.psi);
  const RpcaOutput oracle = rpca_cleartext(A, pca, path);
  {
    ordered_json o;
    o["strategy"] = strategy_name(path.strategy);
    o["qr_variant"] = qr_variant_name(path.variant);
    o["W"] = matrix_json(oracle.W);
    o["eigenvalues"] = std::vector<double>(oracle.eig.l.data(), oracle.eig.l.data() + oracle.eig.l.size());
    ordered_json met;
    met["vs_exact"] = metrics_json(compare(oracle.W, exact));
    o["metrics"] = met;
    rep["oracle"] = o;
    art.files["plot_oracle.csv"] = plot_csv(oracle.Aprime, table.labels);
  }

  std::optional<Mat> fed_W;
  if (runs_federated(cfg.mode)) {
    PcaOutput out;
    SimResult sim = simulate(cfg.parties, cfg.crypto, cfg.profile, cfg.network,
                             [&](Backend& be) { out = run(be, shards, pca, cfg.profile); });
    if (!out.W.allFinite())
      throw NumericError("federated output is not finite; the approximation intervals do not cover the data");
    fed_W = out.W;
    Mat proj(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pca.psi));
    for (std::size_t p = 0; p < parts.size(); ++p)
      for (std::size_t r = 0; r < parts[p].size(); ++r) proj.row(parts[p][r]) = out.Aprime[p].row(static_cast<Eigen::Index>(r));

    ordered_json f;
    f["strategy"] = strategy_name(out.strategy);
    f["qr_variant"] = qr_variant_name(out.variant);
    f["approx"] = approx_name(pca.approx);
    f["intervals"] = specs_json(out.specs);
    f["W"] = matrix_json(out.W);
    ordered_json met;
    met["vs_oracle"] = metrics_json(compare(out.W, oracle.W));
    met["vs_exact"] = metrics_json(compare(out.W, exact));
    met["max_abs_diff_vs_oracle"] = (sign_normalized(out.W) - sign_normalized(oracle.W)).cwiseAbs().maxCoeff();
    f["metrics"] = met;

    const auto want = expected_comm(pca, n, m, t, cfg.crypto.level_budget, out.variant);
    ordered_json steps = ordered_json::array();
    bool conform = true;
    for (const auto& step : sim.book.steps()) {
      ordered_json e;
      e["step"] = step;
      auto w = want.find(step);
      e["expected_comm"] = w == want.end() ? ordered_json(nullptr) : ordered_json(w->second);
      ordered_json per = ordered_json::array();
      for (int p = 0; p < sim.book.parties(); ++p) {
        CostLedger l = sim.book.step_party(step, p);
        if (w != want.end() && std::abs(l.model_ciphertexts - w->second) > 1e-9) conform = false;
        per.push_back(ledger_json(l, cfg.profile));
      }
      e["parties"] = per;
      steps.push_back(e);
    }
    ordered_json led;
    led["comm_matches_formula"] = conform;
    led["steps"] = steps;
    led["barriers"] = sim.barriers.size();
    f["ledger"] = led;
    f["wall_estimate"] = wall_json(sim.wall);
    rep["federated"] = f;
    art.files["plot_federated.csv"] = plot_csv(proj, table.labels);
  }

  if (runs_meta(cfg.mode)) {
    std::vector<Mat> mats;
    for (const auto& s : shards) mats.push_back(s.A);
    const std::size_t rank = cfg.meta_local_rank == 0 ? pca.rho() : cfg.meta_local_rank;
    Mat Wm = meta_analysis(mats, pca.psi, rank);
    ordered_json mj;
    mj["local_rank"] = rank;
    mj["W"] = matrix_json(Wm);
    ordered_json met;
    met["vs_exact"] = metrics_json(compare(Wm, exact));
    met["vs_oracle"] = metrics_json(compare(Wm, oracle.W));
    if (fed_W) met["vs_federated"] = metrics_json(compare(Wm, *fed_W));
    mj["metrics"] = met;
    rep["meta"] = mj;
    Vec mean = A.colwise().mean().transpose();
    Mat proj = (A.rowwise() - mean.transpose()) * Wm.transpose();
    art.files["plot_meta.csv"] = plot_csv(proj, table.labels);
  }

  art.files["report.json"] = rep.dump(2) + "\n";
  return art;
}

void write_artifacts(const RunArtifacts& a, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir);
  for (const auto& [name, body] : a.files) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (fs::path(out_dir) / name).string());
    f << body;
  }
}

std::string CliError::json() const {
  ordered_json j;
  j["error"]["kind"] = kind;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  return j.dump();
}

CliError classify_current_exception() {
  try {
    throw;
  } catch (const ConfigError& e) {
    return {kExitConfig, "config", e.what()};
  } catch (const nlohmann::json::exception& e) {
    return {kExitConfig, "config", e.what()};
  } catch (const DataError& e) {
    return {kExitData, "data", e.what()};
  } catch (const ShapeError& e) {
    return {kExitData, "shape", e.what()};
  } catch (const NumericError& e) {
    return {kExitRuntime, "numeric", e.what()};
  } catch (const LevelError& e) {
    return {kExitRuntime, "level", e.what()};
  } catch (const ProtocolError& e) {
    return {kExitRuntime, "protocol", e.what()};
  } catch (const CapacityError& e) {
    return {kExitRuntime, "capacity", e.what()};
  } catch (const AccessError& e) {
    return {kExitRuntime, "access", e.what()};
  } catch (const std::exception& e) {
    return {kExitInternal, "internal", e.what()};
  } catch (...) {
    return {kExitInternal, "internal", "unknown error"};
  }
}

}  // namespace fedpca
