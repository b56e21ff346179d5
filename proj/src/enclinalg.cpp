// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/enclinalg.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "fedpca/collective.hpp"

namespace fedpca {

int HHSpecs::degree() const { return std::max({sqrt.degree, sign.degree, inv_sqrt.degree}); }

void HHSpecs::validate() const {
  if (sqrt.fn != NonLinear::Sqrt || sign.fn != NonLinear::Sign || inv_sqrt.fn != NonLinear::InvSqrt)
    throw ConfigError("Householder specs bound to the wrong functions");
  sqrt.validate();
  sign.validate();
  inv_sqrt.validate();
}

namespace {

std::vector<std::pair<std::string, HHSpecs*>> groups(LinalgSpecs& s) {
  return {{"qr.first", &s.qr_first}, {"qr.rest", &s.qr_rest}, {"eigen.first", &s.eigen_first}, {"eigen.rest", &s.eigen_rest}};
}

}  // namespace

std::map<std::string, ApproxSpec> LinalgSpecs::by_site() const {
  std::map<std::string, ApproxSpec> out;
  for (auto& [name, g] : groups(const_cast<LinalgSpecs&>(*this))) {
    out[name + ".sqrt"] = g->sqrt;
    out[name + ".sign"] = g->sign;
    out[name + ".inv_sqrt"] = g->inv_sqrt;
  }
  out["eigen.sort.sign"] = sort_sign;
  return out;
}

void LinalgSpecs::set_site(const std::string& site, const ApproxSpec& spec) {
  if (site == "eigen.sort.sign") {
    sort_sign = spec;
    sort_sign.fn = NonLinear::Sign;
    return;
  }
  auto dot = site.rfind('.');
  if (dot == std::string::npos) throw ConfigError("unknown approximation call site: " + site);
  std::string group = site.substr(0, dot);
  NonLinear fn = parse_nonlinear(site.substr(dot + 1));
  for (auto& [name, g] : groups(*this)) {
    if (name != group) continue;
    ApproxSpec s = spec;
    s.fn = fn;
    (fn == NonLinear::Sqrt ? g->sqrt : fn == NonLinear::Sign ? g->sign : g->inv_sqrt) = s;
    return;
  }
  throw ConfigError("unknown approximation call site: " + site);
}

void LinalgSpecs::validate() const {
  qr_first.validate();
  qr_rest.validate();
  eigen_first.validate();
  eigen_rest.validate();
  sort_sign.validate();
}

std::string qr_variant_name(QrVariant v) { return v == QrVariant::QR ? "QR" : "DQR"; }

double hh_comm(std::size_t h, int degree, int lambda, std::size_t t) {
  return (5.0 + 3.0 * poly_depth(degree)) / lambda * static_cast<double>(ceil_div(h, t));
}

double qr_comm(std::size_t delta, std::size_t h, int degree, int lambda, std::size_t t, QrVariant v) {
  const auto d = static_cast<double>(delta);
  const auto blocks = static_cast<double>(ceil_div(h, t));
  double c = d * hh_comm(h, degree, lambda, t) + 4.0 * d * d / lambda * blocks;
  if (v == QrVariant::DQR) c += 3.0 * d * blocks;
  return c;
}

double eigen_comm(std::size_t eta, std::size_t w, int degree, int lambda, std::size_t t) {
  const auto e1 = static_cast<double>(eta) - 1.0;
  const auto wd = static_cast<double>(w);
  return e1 * (hh_comm(eta, degree, lambda, t) + wd * qr_comm(eta, eta, degree, lambda, t)) +
         e1 * (4.0 + 3.0 * wd) / lambda * static_cast<double>(ceil_div(eta, t));
}

QrVariant choose_qr(std::size_t n_max, std::size_t m, double xi) {
  if (n_max == 0 || m == 0) throw ConfigError("choose_qr needs positive dimensions");
  double lhs = xi * std::log2(static_cast<double>(n_max));
  return lhs < std::log2(static_cast<double>(m)) ? QrVariant::DQR : QrVariant::QR;
}

namespace {

using Row = std::vector<Ciphertext>;

class Engine {
 public:
  Engine(Backend& be, Approximator& ap, bool allow_local) : be(be), ap(ap), local(allow_local) {}

  Backend& be;
  Approximator& ap;
  bool local;

  Ciphertext need(const Ciphertext& c, int k) { return ensure_level(be, c, k, local); }
  void need_row(Row& r, int k) {
    for (auto& c : r) c = need(c, k);
  }
  Ciphertext mul(const Ciphertext& a, const Ciphertext& b) {
    return be.maintain(be.mul_cipher(need(a, 1), need(b, 1)));
  }
  Ciphertext mask(const Ciphertext& a, const std::vector<double>& m) {
    return be.maintain(be.mul_plain(need(a, 1), m));
  }
  Ciphertext row_dot(const Row& a, const Row& b) {
    std::optional<Ciphertext> acc;
    for (std::size_t q = 0; q < a.size(); ++q) {
      auto p = be.mul_cipher(need(a[q], 1), need(b[q], 1));
      acc = acc ? be.add(*acc, p) : p;
    }
    return be.maintain(*acc);
  }
  // slot 0 ends up with the sum of the first len slots
  Ciphertext prefix_sum(const Ciphertext& a, std::size_t len) {
    const int K = ceil_log2(std::min(len, be.slots()));
    Ciphertext r = a;
    for (int k = 0; k < K; ++k) r = be.add(r, be.rotate(r, 1L << k));
    return r;
  }
  bool uses_sum_all(std::size_t len) const {
    return len >= be.slots() || 2 * ceil_log2(len) >= be.log_slots();
  }
  int sum_depth(std::size_t len) const { return uses_sum_all(len) ? 0 : 1; }
  // the first len slots (at least) all receive the sum of the first len slots
  Ciphertext broadcast_sum(const Ciphertext& a, std::size_t len) {
    if (uses_sum_all(len)) return be.sum_all(a);
    return be.dup(mask(prefix_sum(a, len), be.onehot(0)), len);
  }
  std::size_t dup_len(std::size_t len) const { return std::min(len, be.slots()); }

  struct Scalars {
    Ciphertext dl0;   // sign(x_c) * ||x|| in slot 0, zero elsewhere
    Ciphertext kinv;  // 1 / ||u|| replicated
  };

  // n2, s2, xc carry ||x||^2, x_c^2 and x_c in slot 0
  Scalars scalars(const HHSpecs& sp, const Ciphertext& n2, const Ciphertext& s2, const Ciphertext& xc, std::size_t y) {
    Ciphertext nrm = ap.sqrt(be, need(n2, poly_depth(sp.sqrt.degree)), sp.sqrt);
    Ciphertext inv = ap.sign_inv_sqrt(be, need(s2, poly_depth(sp.sign.degree)), sp.sign);
    Ciphertext sg = mul(xc, inv);
    // a zero pivot reflects towards +||x||
    sg = be.add_const(be.sub(sg, mul(sg, sg)), 1.0);
    Ciphertext dl0 = mask(mul(sg, nrm), be.onehot(0));
    Ciphertext uc = be.add(xc, dl0);
    Ciphertext k = be.add(be.sub(mul(uc, uc), s2), n2);
    Ciphertext kd = be.dup(mask(k, be.onehot(0)), y);
    Ciphertext kinv = ap.inv_sqrt(be, need(kd, poly_depth(sp.inv_sqrt.degree)), sp.inv_sqrt);
    return {dl0, kinv};
  }

  // x is a row with the pivot in slot c of block 0 and zeros before it
  Row hh(const HHSpecs& sp, Row x, std::size_t c, std::size_t len) {
    std::optional<Ciphertext> acc;
    Ciphertext v20;
    for (std::size_t q = 0; q < x.size(); ++q) {
      Ciphertext sq = mul(x[q], x[q]);
      if (q == 0) v20 = sq;
      acc = acc ? be.add(*acc, sq) : sq;
    }
    const auto cl = static_cast<long>(c);
    Ciphertext n2 = prefix_sum(*acc, len);
    Scalars s = scalars(sp, n2, be.rotate(v20, cl), be.rotate(x[0], cl), dup_len(len));
    x[0] = be.add(x[0], be.rotate(s.dl0, -cl));
    for (auto& b : x) b = mul(b, s.kinv);
    return x;
  }
};

Row encrypt_row(Backend& be, const std::vector<double>& full, std::size_t blocks) {
  const std::size_t t = be.slots();
  Row r(blocks);
  for (std::size_t q = 0; q < blocks; ++q) {
    std::vector<double> part(t, 0.0);
    for (std::size_t u = 0; u < t && q * t + u < full.size(); ++u) part[u] = full[q * t + u];
    r[q] = be.encrypt(part);
  }
  return r;
}

QrResult run_qr(Engine& e, const EncMatrix& V, const HHSpecs& first, const HHSpecs& rest) {
  Backend& be = e.be;
  const std::size_t delta = V.rows, h = V.cols, t = be.slots();
  if (delta == 0) throw ShapeError("QR needs at least one row");
  if (delta > h) throw ShapeError("QR needs delta <= h");
  if (delta > t) throw CapacityError("QR needs delta <= t");
  const int sd = e.sum_depth(h);
  std::vector<Row> rows = V.data;
  std::vector<Row> H(delta);

  for (std::size_t i = 0; i < delta; ++i) {
    Row x = rows[i];
    if (i > 0) x[0] = e.mask(x[0], be.window(i, t));
    Row v = e.hh(i == 0 ? first : rest, x, i, h);
    e.need_row(v, 2 + sd);
    for (std::size_t j = i; j < delta; ++j) {
      e.need_row(rows[j], 2 + sd);
      Ciphertext d = e.broadcast_sum(e.row_dot(rows[j], v), h);
      for (std::size_t q = 0; q < v.size(); ++q)
        rows[j][q] = be.sub(rows[j][q], be.mul_const(e.mul(v[q], d), 2.0));
    }
    H[i] = std::move(v);
  }

  QrResult out;
  out.R.rows = out.R.cols = delta;
  out.R.data.resize(delta);
  for (std::size_t i = 0; i < delta; ++i) out.R.data[i] = {e.mask(rows[i][0], be.window(0, delta))};

  out.Q.rows = delta;
  out.Q.cols = h;
  out.Q.data.resize(delta);
  for (std::size_t j = 0; j < delta; ++j) {
    std::vector<double> unit(j + 1, 0.0);
    unit[j] = 1.0;
    out.Q.data[j] = encrypt_row(be, unit, V.blocks());
  }
  for (std::size_t i = delta; i-- > 0;) {
    e.need_row(H[i], 2 + sd);
    for (std::size_t j = i; j < delta; ++j) {
      Row& q = out.Q.data[j];
      e.need_row(q, 2 + sd);
      Ciphertext d = e.broadcast_sum(e.row_dot(q, H[i]), h);
      for (std::size_t b = 0; b < q.size(); ++b) q[b] = be.sub(q[b], be.mul_const(e.mul(H[i][b], d), 2.0));
    }
  }
  return out;
}

class ActorGuard {
 public:
  ActorGuard(Backend& be, int party) {
    if (party >= 0) scope_.emplace(be, std::vector<int>{party});
  }

 private:
  std::optional<ActorScope> scope_;
};

DqrResult run_dqr(Engine& e, const std::vector<EncMatrix>& shards, const HHSpecs& first, const HHSpecs& rest) {
  Backend& be = e.be;
  const std::size_t s = shards.size(), t = be.slots();
  const std::size_t delta = shards[0].rows;
  std::vector<std::size_t> off(s), width(s);
  std::size_t h = 0;
  for (std::size_t p = 0; p < s; ++p) {
    if (shards[p].rows != delta) throw ShapeError("DQR shards must share the row count");
    if (shards[p].cols == 0) throw ShapeError("DQR shards must be non-empty");
    off[p] = h;
    width[p] = shards[p].cols;
    h += width[p];
  }
  if (delta == 0 || delta > h) throw ShapeError("DQR needs 0 < delta <= h");
  if (delta > t) throw CapacityError("QR needs delta <= t");
  std::size_t y = 1;
  for (std::size_t p = 0; p < s; ++p) y = std::max(y, e.dup_len(width[p]));
  auto owner_of = [&](std::size_t col) {
    std::size_t p = 0;
    while (col >= off[p] + width[p]) ++p;
    return p;
  };
  auto party = [](std::size_t p) { return static_cast<int>(p); };

  std::vector<std::vector<Row>> rows(s);
  for (std::size_t p = 0; p < s; ++p) rows[p] = shards[p].data;
  std::vector<std::vector<Row>> H(s, std::vector<Row>(delta));

  // packs per-row partial inner products into slot (j - i), aggregates, and hands back the replicated totals
  auto exchange = [&](std::size_t i, std::size_t o, auto&& partial_row, auto&& other_rows) {
    std::vector<Ciphertext> contrib(s);
    for (std::size_t p = 0; p < s; ++p) {
      ActorGuard g(be, party(p));
      std::optional<Ciphertext> pack;
      if (p >= o) {
        for (std::size_t j = i; j < delta; ++j) {
          Ciphertext part = e.mask(e.prefix_sum(e.row_dot(other_rows(p, j), partial_row(p)), width[p]), be.onehot(0));
          part = be.rotate(part, -static_cast<long>(j - i));
          pack = pack ? be.add(*pack, part) : part;
        }
      }
      contrib[p] = pack ? *pack : be.encrypt_zero();
    }
    Ciphertext agg = e.need(aggregate_broadcast(be, contrib), 2);
    std::vector<Ciphertext> d(delta);
    for (std::size_t j = i; j < delta; ++j) {
      auto jl = static_cast<long>(j - i);
      d[j] = be.dup(be.rotate(e.mask(agg, be.onehot(j - i)), jl), y);
    }
    return d;
  };

  for (std::size_t i = 0; i < delta; ++i) {
    const std::size_t o = owner_of(i), c = i - off[o];
    const auto cl = static_cast<long>(c);
    const HHSpecs& sp = i == 0 ? first : rest;
    std::vector<Row> x(s);
    std::vector<Ciphertext> contrib(s);
    for (std::size_t p = 0; p < s; ++p) {
      ActorGuard g(be, party(p));
      if (p < o) {
        contrib[p] = be.encrypt_zero();
        continue;
      }
      x[p] = rows[p][i];
      if (p == o && c > 0) x[p][0] = e.mask(x[p][0], be.window(c, t));
      std::optional<Ciphertext> acc;
      Ciphertext v20;
      for (std::size_t q = 0; q < x[p].size(); ++q) {
        Ciphertext sq = e.mul(x[p][q], x[p][q]);
        if (q == 0) v20 = sq;
        acc = acc ? be.add(*acc, sq) : sq;
      }
      Ciphertext part = e.mask(e.prefix_sum(*acc, width[p]), be.onehot(0));
      if (p == o) {
        part = be.add(part, be.rotate(e.mask(v20, be.onehot(c)), cl - 1));
        part = be.add(part, be.rotate(e.mask(x[p][0], be.onehot(c)), cl - 2));
      }
      contrib[p] = part;
    }
    Ciphertext agg = aggregate_broadcast(be, contrib);
    Engine::Scalars sc = e.scalars(sp, agg, be.rotate(agg, 1), be.rotate(agg, 2), y);

    for (std::size_t p = o; p < s; ++p) {
      ActorGuard g(be, party(p));
      if (p == o) x[p][0] = be.add(x[p][0], be.rotate(sc.dl0, -cl));
      for (auto& b : x[p]) b = e.mul(b, sc.kinv);
      e.need_row(x[p], 1);
      H[p][i] = x[p];
      for (std::size_t j = i; j < delta; ++j) e.need_row(rows[p][j], 2);
    }
    auto d = exchange(i, o, [&](std::size_t p) -> const Row& { return H[p][i]; },
                      [&](std::size_t p, std::size_t j) -> const Row& { return rows[p][j]; });
    for (std::size_t p = o; p < s; ++p) {
      ActorGuard g(be, party(p));
      for (std::size_t j = i; j < delta; ++j)
        for (std::size_t q = 0; q < rows[p][j].size(); ++q)
          rows[p][j][q] = be.sub(rows[p][j][q], be.mul_const(e.mul(H[p][i][q], d[j]), 2.0));
    }
  }

  DqrResult out;
  out.R.rows = out.R.cols = delta;
  out.R.data.resize(delta);
  if (width[0] >= delta) {
    ActorGuard g(be, 0);
    for (std::size_t i = 0; i < delta; ++i) out.R.data[i] = {e.mask(rows[0][i][0], be.window(0, delta))};
  } else {
    for (std::size_t i = 0; i < delta; ++i) {
      std::vector<Ciphertext> parts(s);
      for (std::size_t p = 0; p < s; ++p) {
        ActorGuard g(be, party(p));
        if (off[p] >= delta) {
          parts[p] = be.encrypt_zero();
          continue;
        }
        auto m = e.mask(rows[p][i][0], be.window(0, std::min(width[p], delta - off[p])));
        parts[p] = be.rotate(m, -static_cast<long>(off[p]));
      }
      out.R.data[i] = {aggregate_broadcast(be, parts)};
    }
  }

  out.Q.resize(s);
  for (std::size_t p = 0; p < s; ++p) {
    ActorGuard g(be, party(p));
    EncMatrix& Q = out.Q[p];
    Q.rows = delta;
    Q.cols = width[p];
    Q.data.resize(delta);
    for (std::size_t j = 0; j < delta; ++j) {
      std::vector<double> unit(width[p], 0.0);
      if (j >= off[p] && j < off[p] + width[p]) unit[j - off[p]] = 1.0;
      Q.data[j] = encrypt_row(be, unit, shards[p].blocks());
    }
  }
  for (std::size_t i = delta; i-- > 0;) {
    const std::size_t o = owner_of(i);
    for (std::size_t p = o; p < s; ++p) {
      ActorGuard g(be, party(p));
      e.need_row(H[p][i], 1);
      for (std::size_t j = i; j < delta; ++j) e.need_row(out.Q[p].data[j], 2);
    }
    auto d = exchange(i, o, [&](std::size_t p) -> const Row& { return H[p][i]; },
                      [&](std::size_t p, std::size_t j) -> const Row& { return out.Q[p].data[j]; });
    for (std::size_t p = o; p < s; ++p) {
      ActorGuard g(be, party(p));
      for (std::size_t j = i; j < delta; ++j) {
        Row& q = out.Q[p].data[j];
        for (std::size_t b = 0; b < q.size(); ++b) q[b] = be.sub(q[b], be.mul_const(e.mul(H[p][i][b], d[j]), 2.0));
      }
    }
  }
  return out;
}

}  // namespace

Ciphertext householder(Backend& be, Approximator& ap, const Ciphertext& v, std::size_t h, const HHSpecs& specs) {
  if (h == 0 || h > be.slots()) throw ShapeError("householder needs 1 <= h <= t");
  specs.validate();
  Engine e(be, ap, false);
  Ciphertext out;
  {
    ModelMute mute(be);
    out = e.hh(specs, {v}, 0, h)[0];
  }
  be.charge_model(hh_comm(h, specs.degree(), be.max_level(), be.slots()));
  return out;
}

QrResult qr_t(Backend& be, Approximator& ap, const EncMatrix& V, const HHSpecs& first, const HHSpecs& rest) {
  first.validate();
  rest.validate();
  Engine e(be, ap, false);
  QrResult out;
  {
    ModelMute mute(be);
    out = run_qr(e, V, first, rest);
  }
  be.charge_model(qr_comm(V.rows, V.cols, first.degree(), be.max_level(), be.slots()));
  return out;
}

DqrResult dqr_t(Backend& be, Approximator& ap, const std::vector<EncMatrix>& shards, const HHSpecs& first,
                const HHSpecs& rest) {
  if (shards.empty()) throw ShapeError("DQR needs at least one shard");
  if (static_cast<int>(shards.size()) != be.parties()) throw ShapeError("DQR needs one shard per party");
  if (shards.size() == 1) {
    QrResult r = qr_t(be, ap, shards[0], first, rest);
    return {{r.Q}, r.R};
  }
  first.validate();
  rest.validate();
  Engine e(be, ap, true);
  DqrResult out;
  std::size_t h = 0;
  for (const auto& sh : shards) h += sh.cols;
  {
    ModelMute mute(be);
    out = run_dqr(e, shards, first, rest);
  }
  be.charge_model(qr_comm(shards[0].rows, h, first.degree(), be.max_level(), be.slots(), QrVariant::DQR));
  return out;
}

namespace {

Ciphertext pack_rows(Backend& be, const std::vector<Ciphertext>& rows, std::size_t stride) {
  std::optional<Ciphertext> acc;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Ciphertext c = r == 0 ? rows[r] : be.rotate(rows[r], -static_cast<long>(r * stride));
    acc = acc ? be.add(*acc, c) : c;
  }
  return *acc;
}

std::vector<double> diag_plain(std::size_t t, std::size_t eta, std::size_t from, std::size_t to) {
  std::vector<double> v(t, 0.0);
  for (std::size_t r = from; r < to; ++r) v[r * eta + r] = 1.0;
  return v;
}

}  // namespace

EigResult eigen(Backend& be, Approximator& ap, const EncMatrix& Z, std::size_t w, const LinalgSpecs& specs) {
  const std::size_t eta = Z.rows, t = be.slots();
  if (Z.cols != eta) throw ShapeError("eigen needs a square matrix");
  if (eta < 2) throw ShapeError("eigen needs eta >= 2");
  if (eta * eta > t || (eta * eta != t && 2 * eta * eta > t)) throw CapacityError("eigen needs 2*eta^2 <= t or eta^2 == t");
  specs.validate();
  Engine e(be, ap, false);
  const auto el = static_cast<long>(eta);
  auto unpack_row = [&](const Ciphertext& P, std::size_t r, std::size_t from, std::size_t to) {
    return be.rotate(e.mask(P, be.window(r * eta + from, r * eta + to)), static_cast<long>(r) * el);
  };
  auto m5 = [&](const Ciphertext& a, const Ciphertext& b) { return mul_m5_packed(be, e.need(a, 3), e.need(b, 3), eta); };

  EigResult out;
  {
    ModelMute mute(be);
    std::vector<Ciphertext> zrows(eta);
    for (std::size_t r = 0; r < eta; ++r) zrows[r] = Z.data[r][0];
    Ciphertext Mp = pack_rows(be, zrows, eta);
    Ciphertext Qp = be.encrypt(diag_plain(t, eta, 0, eta));

    for (std::size_t i = 0; i + 2 < eta; ++i) {
      Ciphertext x = unpack_row(Mp, i, i + 1, eta);
      Ciphertext v = e.hh(specs.eigen_first, {x}, i + 1, eta)[0];
      v = e.need(v, 2);
      std::vector<Ciphertext> prow;
      std::optional<Ciphertext> refl;
      for (std::size_t r = i + 1; r < eta; ++r) {
        Ciphertext vr = be.dup(be.rotate(e.mask(v, be.onehot(r)), static_cast<long>(r)), eta);
        Ciphertext row = be.mul_const(e.mul(v, vr), -2.0);
        row = be.rotate(row, -static_cast<long>(r * eta));
        refl = refl ? be.add(*refl, row) : row;
      }
      Ciphertext Pp = e.need(be.add_plain(*refl, diag_plain(t, eta, 0, eta)), 3);
      Qp = m5(Pp, Qp);
      Mp = m5(m5(Pp, Mp), Pp);
    }

    Ciphertext Tp = Mp;
    std::optional<Ciphertext> l;
    for (std::size_t i = eta - 1; i >= 1; --i) {
      const std::size_t a = i + 1;
      for (std::size_t j = 0; j < w; ++j) {
        Tp = e.need(Tp, 3);
        Ciphertext sigma = be.dup(be.rotate(e.mask(Tp, be.onehot(i * eta + i)), static_cast<long>(i * eta + i)), eta * eta);
        Ciphertext Sp = e.mask(sigma, diag_plain(t, eta, 0, a));
        Ciphertext shifted = e.need(be.sub(Tp, Sp), 4);
        EncMatrix V;
        V.rows = V.cols = a;
        V.data.resize(a);
        for (std::size_t r = 0; r < a; ++r) V.data[r] = {unpack_row(shifted, r, 0, a)};
        QrResult f = run_qr(e, V, specs.eigen_rest, specs.eigen_rest);
        std::vector<Ciphertext> qrows(a), rrows(a);
        for (std::size_t r = 0; r < a; ++r) {
          qrows[r] = f.Q.data[r][0];
          rrows[r] = f.R.data[r][0];
        }
        Ciphertext Qa = pack_rows(be, qrows, eta);
        Tp = be.add(m5(Qa, pack_rows(be, rrows, eta)), Sp);
        Qp = m5(a < eta ? be.add_plain(Qa, diag_plain(t, eta, a, eta)) : Qa, Qp);
      }
      Ciphertext li = be.rotate(e.mask(Tp, be.onehot(i * eta + i)), static_cast<long>(i * eta));
      l = l ? be.add(*l, li) : li;
    }
    l = be.add(*l, e.mask(Tp, be.onehot(0)));

    std::vector<Ciphertext> q(eta);
    for (std::size_t r = 0; r < eta; ++r) q[r] = unpack_row(Qp, r, 0, eta);

    // odd-even transposition network, largest first
    const ApproxSpec& ss = specs.sort_sign;
    for (std::size_t round = 0; round < eta; ++round) {
      std::vector<double> pm(t, 0.0);
      for (std::size_t r = round % 2; r + 1 < eta; r += 2) pm[r] = 1.0;
      if (round % 2 + 1 >= eta) continue;
      Ciphertext d = be.sub(*l, be.rotate(*l, 1));
      Ciphertext dm = e.mask(d, pm);
      Ciphertext inv = ap.sign_inv_sqrt(be, e.need(e.mul(dm, dm), poly_depth(ss.degree)), ss);
      Ciphertext sg = e.mul(dm, inv);
      Ciphertext swap = be.mul_const(be.add_plain(be.negate(sg), pm), 0.5);
      Ciphertext ed = e.mul(swap, d);
      l = be.add(be.sub(*l, ed), be.rotate(ed, -1));
      swap = e.need(swap, 2);
      for (std::size_t r = round % 2; r + 1 < eta; r += 2) {
        Ciphertext wr = be.dup(be.rotate(e.mask(swap, be.onehot(r)), static_cast<long>(r)), eta);
        Ciphertext delta = e.mul(wr, be.sub(q[r + 1], q[r]));
        q[r] = be.add(q[r], delta);
        q[r + 1] = be.sub(q[r + 1], delta);
      }
    }
    out.l = *l;
    out.Q.rows = out.Q.cols = eta;
    out.Q.data.resize(eta);
    for (std::size_t r = 0; r < eta; ++r) out.Q.data[r] = {q[r]};
  }
  be.charge_model(eigen_comm(eta, w, specs.eigen_rest.degree(), be.max_level(), t));
  return out;
}

}  // namespace fedpca
