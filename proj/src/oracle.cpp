// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/oracle.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace fedpca {

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Auto:
      return "auto";
    case Strategy::Precomp:
      return "precomp";
    case Strategy::Seq:
      return "seq";
  }
  return "auto";
}

Strategy parse_strategy(const std::string& s) {
  if (s == "auto") return Strategy::Auto;
  if (s == "precomp") return Strategy::Precomp;
  if (s == "seq") return Strategy::Seq;
  throw ConfigError("unknown strategy: " + s);
}

void PcaParams::validate(std::size_t n, std::size_t m) const {
  if (psi == 0) throw ConfigError("psi must be positive");
  if (rho() < 2) throw ConfigError("rho = psi + alpha must be at least 2");
  if (rho() > n || rho() > m) throw ConfigError("rho = psi + alpha exceeds min(n, m)");
  if (!(xi > 0)) throw ConfigError("network factor xi must be positive");
  if (!(interval_factor >= 1)) throw ConfigError("interval factor must be >= 1");
  specs.validate();
}

Mat count_sketch(std::size_t rho, std::size_t n, std::uint64_t seed) {
  if (rho == 0) throw ConfigError("sketch needs rho >= 1");
  std::mt19937_64 eng(seed);
  Mat S = Mat::Zero(static_cast<Eigen::Index>(rho), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t r = eng() % rho;
    const double sg = (eng() >> 63) != 0 ? 1.0 : -1.0;
    S(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = sg;
  }
  return S;
}

void RangeRecorder::record(const std::string& site, double x) {
  auto it = ranges_.find(site);
  if (it == ranges_.end()) {
    ranges_[site] = {x, x};
  } else {
    it->second.first = std::min(it->second.first, x);
    it->second.second = std::max(it->second.second, x);
  }
  if (x != 0) {
    auto mt = min_mag_.find(site);
    if (mt == min_mag_.end() || std::abs(x) < mt->second) min_mag_[site] = std::abs(x);
  }
}

double RangeRecorder::min_magnitude(const std::string& site) const {
  auto it = min_mag_.find(site);
  return it == min_mag_.end() ? 0.0 : it->second;
}

LinalgSpecs fit_intervals(const RangeRecorder& rec, const LinalgSpecs& base, double factor) {
  if (!(factor >= 1)) throw ConfigError("interval safety factor must be >= 1");
  LinalgSpecs out = base;
  for (const auto& [site, spec] : base.by_site()) {
    if (!rec.has(site)) continue;
    auto [lo, hi] = rec.range(site);
    ApproxSpec s = spec;
    const double span = std::max(std::abs(lo), std::abs(hi));
    if (span == 0) continue;
    if (s.fn == NonLinear::Sign) {
      s.hi = span * factor;
      s.lo = -s.hi;
      s.min_magnitude = std::max(rec.min_magnitude(site) / factor, 1e-3 * s.hi);
    } else if (s.fn == NonLinear::Sqrt) {
      s.lo = std::max(0.0, lo / factor);
      s.hi = hi * factor;
    } else {
      s.lo = lo > 0 ? lo / factor : 1e-4 * hi;
      s.hi = hi * factor;
    }
    if (!(s.hi > s.lo)) s.hi = s.lo + std::max(1e-9, std::abs(s.lo));
    out.set_site(site, s);
  }
  return out;
}

Vec householder_clear(const Vec& x, std::size_t c, RangeRecorder* rec, const std::string& group) {
  const auto ci = static_cast<Eigen::Index>(c);
  Vec u = Vec::Zero(x.size());
  u.tail(x.size() - ci) = x.tail(x.size() - ci);
  const double n2 = u.squaredNorm();
  const double xc = u(ci);
  const double s2 = xc * xc;
  if (rec != nullptr) {
    rec->record(group + ".sqrt", n2);
    rec->record(group + ".sign", xc);
  }
  const double nrm = exact_value(NonLinear::Sqrt, n2);
  double sg = xc * exact_value(NonLinear::InvSqrt, s2);
  sg = 1 + sg - sg * sg;
  const double uc = xc + sg * nrm;
  const double k = uc * uc - s2 + n2;
  if (rec != nullptr) rec->record(group + ".inv_sqrt", k);
  u(ci) = uc;
  return u * exact_value(NonLinear::InvSqrt, k);
}

ClearQr qr_rows(const Mat& V, RangeRecorder* rec, const std::string& first, const std::string& rest) {
  const Eigen::Index d = V.rows(), h = V.cols();
  if (d > h) throw ShapeError("qr_rows needs rows <= cols");
  Mat rows = V;
  std::vector<Vec> vs;
  ClearQr out{Mat::Zero(d, h), Mat::Zero(d, d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    Vec v = householder_clear(rows.row(i).transpose(), static_cast<std::size_t>(i), rec, i == 0 ? first : rest);
    for (Eigen::Index j = i; j < d; ++j) rows.row(j) -= 2.0 * rows.row(j).dot(v) * v.transpose();
    out.R.row(i) = rows.row(i).head(d);
    for (Eigen::Index j = i + 1; j < d; ++j) out.R(i, j) = 0;
    vs.push_back(v);
  }
  out.Q.leftCols(d) = Mat::Identity(d, d);
  for (Eigen::Index i = d; i-- > 0;) {
    const Vec& v = vs[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i; j < d; ++j) out.Q.row(j) -= 2.0 * out.Q.row(j).dot(v) * v.transpose();
  }
  return out;
}

ClearEig eigen_iterative(const Mat& Z, std::size_t w, RangeRecorder* rec) {
  const Eigen::Index eta = Z.rows();
  if (Z.cols() != eta || eta < 2) throw ShapeError("eigen needs a square matrix with eta >= 2");
  Mat M = Z;
  Mat Q = Mat::Identity(eta, eta);
  for (Eigen::Index i = 0; i + 2 < eta; ++i) {
    Vec v = householder_clear(M.row(i).transpose(), static_cast<std::size_t>(i + 1), rec, "eigen.first");
    Mat P = Mat::Identity(eta, eta) - 2.0 * v * v.transpose();
    Q = P * Q;
    M = (P * M) * P;
  }
  Mat T = M;
  Vec l = Vec::Zero(eta);
  for (Eigen::Index i = eta - 1; i >= 1; --i) {
    const Eigen::Index a = i + 1;
    for (std::size_t j = 0; j < w; ++j) {
      const double sigma = T(i, i);
      Mat V = T.topLeftCorner(a, a) - sigma * Mat::Identity(a, a);
      ClearQr f = qr_rows(V, rec, "eigen.rest", "eigen.rest");
      Mat next = Mat::Zero(eta, eta);
      next.topLeftCorner(a, a) = f.Q * f.R + sigma * Mat::Identity(a, a);
      T = next;
      Mat Qa = Mat::Identity(eta, eta);
      Qa.topLeftCorner(a, a) = f.Q;
      Q = Qa * Q;
    }
    l(i) = T(i, i);
  }
  l(0) = T(0, 0);
  for (Eigen::Index round = 0; round < eta; ++round) {
    for (Eigen::Index r = round % 2; r + 1 < eta; r += 2) {
      const double d = l(r) - l(r + 1);
      if (rec != nullptr) rec->record("eigen.sort.sign", d);
      const double sw = 0.5 * (1.0 - exact_value(NonLinear::Sign, d));
      const double ed = sw * d;
      l(r) -= ed;
      l(r + 1) += ed;
      Vec delta = sw * (Q.row(r + 1) - Q.row(r)).transpose();
      Q.row(r) += delta.transpose();
      Q.row(r + 1) -= delta.transpose();
    }
  }
  return {l, Q};
}

ClearEig eig_bruteforce(const Mat& Zin) {
  const Eigen::Index n = Zin.rows();
  if (Zin.cols() != n) throw ShapeError("eig_bruteforce needs a square matrix");
  if (n > 64) throw ShapeError("eig_bruteforce is limited to 64 x 64");
  Mat A = 0.5 * (Zin + Zin.transpose());
  Mat V = Mat::Identity(n, n);
  const double scale = std::max(A.norm(), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (std::sqrt(off) <= 1e-17 * scale) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (A(p, q) == 0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2 * A(p, q));
        const double tn = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(tn * tn + 1), s = tn * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return A(a, a) > A(b, b); });
  ClearEig out{Vec(n), Mat(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.l(i) = A(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.Q.row(i) = V.col(order[static_cast<std::size_t>(i)]).transpose();
  }
  return out;
}

namespace {

Mat centered(const Mat& A, const Vec& mean) { return A.rowwise() - mean.transpose(); }

}  // namespace

RpcaOutput rpca_cleartext(const Mat& A, const PcaParams& params, const RpcaPath& path, RangeRecorder* rec) {
  const auto n = static_cast<std::size_t>(A.rows()), m = static_cast<std::size_t>(A.cols());
  params.validate(n, m);
  const double inv_n = 1.0 / static_cast<double>(n);
  RpcaOutput out;
  out.mean = A.colwise().sum().transpose() * inv_n;
  const Mat C = centered(A, out.mean);
  const Mat Pi = count_sketch(params.rho(), n, params.sketch_seed);
  Mat P = Pi * A;
  auto times_cov = [&](const Mat& X) -> Mat { return ((X * C.transpose()) * C) * inv_n; };
  for (std::size_t it = 0; it < params.p; ++it) {
    const std::string site = it == 0 ? "qr.first" : "qr.rest";
    Mat Y;
    if (path.strategy == Strategy::Seq && path.variant == QrVariant::DQR) {
      Mat X = qr_rows(P * C.transpose(), rec, site, site).Q;
      Y = (X * C) * inv_n;
    } else {
      Y = times_cov(P);
    }
    P = qr_rows(Y, rec, site, site).Q;
  }
  out.Z = times_cov(P) * P.transpose();
  out.eig = eigen_iterative(out.Z, params.w, rec);
  Mat top = out.eig.Q.topRows(static_cast<Eigen::Index>(params.psi));
  out.W = qr_rows(times_cov(top * P), rec, "qr.rest", "qr.rest").Q;
  out.Aprime = C * out.W.transpose();
  return out;
}

Mat pca_exact(const Mat& A, std::size_t psi) {
  Vec mean = A.colwise().mean().transpose();
  Eigen::JacobiSVD<Mat> svd(centered(A, mean), Eigen::ComputeThinV);
  return svd.matrixV().leftCols(static_cast<Eigen::Index>(psi)).transpose();
}

Mat meta_analysis(const std::vector<Mat>& shards, std::size_t psi, std::size_t local_rank) {
  if (shards.empty()) throw ShapeError("meta-analysis needs at least one shard");
  const Eigen::Index m = shards.front().cols();
  std::vector<Mat> parts;
  Eigen::Index total = 0;
  for (const Mat& S : shards) {
    if (S.cols() != m) throw ShapeError("shards differ in feature count");
    Vec mean = S.colwise().mean().transpose();
    Eigen::JacobiSVD<Mat> svd(centered(S, mean), Eigen::ComputeThinV);
    const Eigen::Index k = std::min<Eigen::Index>(static_cast<Eigen::Index>(local_rank), svd.singularValues().size());
    parts.push_back(svd.singularValues().head(k).asDiagonal() * svd.matrixV().leftCols(k).transpose());
    total += k;
  }
  Mat stacked(total, m);
  Eigen::Index r = 0;
  for (const Mat& p : parts) {
    stacked.middleRows(r, p.rows()) = p;
    r += p.rows();
  }
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeThinV);
  return svd.matrixV().leftCols(static_cast<Eigen::Index>(psi)).transpose();
}

namespace {

double pearson(const Vec& a, const Vec& b) {
  Vec x = a.array() - a.mean(), y = b.array() - b.mean();
  const double den = x.norm() * y.norm();
  return den == 0 ? 0.0 : x.dot(y) / den;
}

Mat orthonormal_rows(const Mat& W) {
  Eigen::HouseholderQR<Mat> qr(W.transpose());
  return (qr.householderQ() * Mat::Identity(W.cols(), W.rows())).transpose();
}

}  // namespace

Metrics compare(const Mat& Wa, const Mat& Wb) {
  if (Wa.rows() != Wb.rows() || Wa.cols() != Wb.cols()) throw ShapeError("compare needs equal shapes");
  const Eigen::Index k = Wa.rows();
  Mat corr(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) corr(a, b) = pearson(Wa.row(a).transpose(), Wb.row(b).transpose());
  std::vector<bool> used_a(static_cast<std::size_t>(k)), used_b(static_cast<std::size_t>(k));
  std::vector<Eigen::Index> match(static_cast<std::size_t>(k));
  for (Eigen::Index step = 0; step < k; ++step) {
    double best = -1;
    Eigen::Index ba = 0, bb = 0;
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b)
        if (!used_a[static_cast<std::size_t>(a)] && !used_b[static_cast<std::size_t>(b)] && std::abs(corr(a, b)) > best) {
          best = std::abs(corr(a, b));
          ba = a;
          bb = b;
        }
    used_a[static_cast<std::size_t>(ba)] = used_b[static_cast<std::size_t>(bb)] = true;
    match[static_cast<std::size_t>(ba)] = bb;
  }
  Metrics out;
  double se = 0;
  for (Eigen::Index a = 0; a < k; ++a) {
    const Eigen::Index b = match[static_cast<std::size_t>(a)];
    const double c = corr(a, b);
    const double sg = c < 0 ? -1.0 : 1.0;
    se += (Wa.row(a) - sg * Wb.row(b)).squaredNorm();
    out.r2.push_back(c * c);
  }
  out.mse = se / static_cast<double>(Wa.size());
  for (double r : out.r2) out.r2_mean += r;
  out.r2_mean /= static_cast<double>(k);
  Eigen::JacobiSVD<Mat> svd(orthonormal_rows(Wa) * orthonormal_rows(Wb).transpose());
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    out.principal_angles.push_back(std::acos(std::clamp(svd.singularValues()(i), -1.0, 1.0)));
  return out;
}

Mat sign_normalized(const Mat& W) {
  Mat out = W;
  for (Eigen::Index r = 0; r < W.rows(); ++r) {
    Eigen::Index idx = 0;
    W.row(r).cwiseAbs().maxCoeff(&idx);
    if (W(r, idx) < 0) out.row(r) = -W.row(r);
  }
  return out;
}

}  // namespace fedpca
