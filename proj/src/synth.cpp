// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/synth.hpp"

#include <fstream>
#include <random>

#include "fedpca/textio.hpp"

namespace fedpca {

namespace {

// mean + sd * (mixed latent factors + idiosyncratic noise), each column unit variance before scaling
LabeledData latent_table(std::size_t n, const std::vector<std::string>& names, const std::vector<double>& mean,
                         const std::vector<double>& sd, std::size_t factors, std::uint64_t seed) {
  const auto m = static_cast<Eigen::Index>(names.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat L(m, static_cast<Eigen::Index>(factors));
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < L.cols(); ++k) L(j, k) = g(rng) / static_cast<double>(k + 1);
  Vec load = (L.rowwise().squaredNorm().array() + 0.3).sqrt();
  LabeledData d;
  d.columns = names;
  d.X.resize(static_cast<Eigen::Index>(n), m);
  Vec z(L.cols());
  for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = g(rng);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double v = (L.row(j).dot(z) + std::sqrt(0.3) * g(rng)) / load(j);
      d.X(i, j) = mean[static_cast<std::size_t>(j)] + sd[static_cast<std::size_t>(j)] * v;
    }
  }
  return d;
}

}  // namespace

LabeledData synth_pima(std::uint64_t seed) {
  return latent_table(767,
                      {"pregnancies", "glucose", "blood_pressure", "skin_thickness", "insulin", "bmi", "pedigree",
                       "age"},
                      {3.8, 120.9, 69.1, 20.5, 79.8, 32.0, 0.47, 33.2}, {3.4, 32.0, 19.4, 16.0, 115.2, 7.9, 0.33, 11.8},
                      3, seed);
}

LabeledData synth_wine(std::uint64_t seed) {
  return latent_table(4898,
                      {"fixed_acidity", "volatile_acidity", "citric_acid", "residual_sugar", "chlorides",
                       "free_sulfur_dioxide", "total_sulfur_dioxide", "density", "ph", "sulphates", "alcohol"},
                      {6.85, 0.28, 0.33, 6.39, 0.046, 35.3, 138.4, 0.994, 3.19, 0.49, 10.5},
                      {0.84, 0.10, 0.12, 5.07, 0.022, 17.0, 42.5, 0.003, 0.15, 0.11, 1.23}, 4, seed);
}

LabeledData synth_clusters(std::size_t per_cluster, std::size_t m, std::size_t clusters, double separation,
                           std::uint64_t seed) {
  if (clusters == 0 || m == 0 || per_cluster == 0) throw ConfigError("cluster data needs positive sizes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  LabeledData d;
  for (std::size_t j = 0; j < m; ++j) d.columns.push_back("x" + std::to_string(j + 1));
  d.X.resize(static_cast<Eigen::Index>(per_cluster * clusters), static_cast<Eigen::Index>(m));
  Eigen::Index r = 0;
  for (std::size_t c = 0; c < clusters; ++c)
    for (std::size_t i = 0; i < per_cluster; ++i, ++r) {
      for (Eigen::Index j = 0; j < d.X.cols(); ++j) d.X(r, j) = g(rng);
      d.X(r, static_cast<Eigen::Index>(c % m)) += separation;
      d.labels.push_back("c" + std::to_string(c));
    }
  return d;
}

void write_csv(const std::string& path, const LabeledData& d) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  for (std::size_t j = 0; j < d.columns.size(); ++j) f << (j ? "," : "") << d.columns[j];
  if (!d.labels.empty()) f << ",label";
  f << "\n";
  for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) f << (j ? "," : "") << format_double(d.X(i, j));
    if (!d.labels.empty()) f << "," << d.labels[static_cast<std::size_t>(i)];
    f << "\n";
  }
}

}  // namespace fedpca
