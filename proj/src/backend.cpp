// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedpca/backend.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "fedpca/debug.hpp"

namespace fedpca {

void CryptoParams::validate() const {
  if (!is_pow2(ring_degree) || ring_degree < 2) throw ConfigError("ring_degree must be a power of two >= 2");
  if (level_budget < 1) throw ConfigError("level_budget must be >= 1");
  if (noise_std < 0) throw ConfigError("noise_std must be >= 0");
  if (ciphertext_bytes <= 0) throw ConfigError("ciphertext_bytes must be positive");
}

Backend::Backend(CryptoParams params, int parties)
    : params_(params), t_(params.slot_count()), log_t_(0), book_(parties), rng_(params.noise_seed) {
  params_.validate();
  if (parties < 1) throw ConfigError("party count must be positive");
  log_t_ = exact_log2(t_);
  actors_ = all_parties();
}

std::vector<int> Backend::all_parties() const {
  std::vector<int> v(static_cast<std::size_t>(parties()));
  for (int i = 0; i < parties(); ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

void Backend::set_actors(std::vector<int> a) {
  for (int p : a)
    if (p < 0 || p >= parties()) throw ConfigError("actor index out of range");
  actors_ = std::move(a);
}

void Backend::record_barrier(BarrierKind kind, double payload) {
  barriers_.push_back({step_, kind, payload, parties()});
}

void Backend::charge(const std::function<void(CostLedger&)>& f) {
  for (int p : actors_) f(book_.at(step_, p));
}

void Backend::charge_party(int party, const std::function<void(CostLedger&)>& f) {
  f(book_.at(step_, party));
}

void Backend::charge_model(double ciphertexts) {
  if (model_mute_depth > 0) return;
  charge([&](CostLedger& l) { l.model_ciphertexts += ciphertexts; });
}

void Backend::check_plain(std::size_t n) const {
  if (n > t_) throw CapacityError("plaintext longer than slot count");
}

Ciphertext Backend::derive(const Ciphertext& a) const {
  Ciphertext r;
  r.level_ = a.level_;
  r.pending_rescale_ = a.pending_rescale_;
  r.pending_relin_ = a.pending_relin_;
  r.owner_ = a.owner_;
  r.shared_ = a.shared_ && !local_context();
  return r;
}

Ciphertext Backend::derive(const Ciphertext& a, const Ciphertext& b) {
  if (a.slots_.size() != t_ || b.slots_.size() != t_) throw ProtocolError("operand is not a valid ciphertext");
  if (a.owner_ != b.owner_) throw ProtocolError("operands under different keys");
  Ciphertext r = derive(a);
  r.level_ = std::min(a.level_, b.level_);
  r.pending_rescale_ = a.pending_rescale_ || b.pending_rescale_;
  r.pending_relin_ = a.pending_relin_ || b.pending_relin_;
  r.shared_ = a.shared_ && b.shared_ && !local_context();
  if (a.level_ != b.level_) charge([](CostLedger& l) { ++l.level_drops; });
  return r;
}

Ciphertext Backend::encrypt(std::span<const double> plain) {
  check_plain(plain.size());
  Ciphertext c;
  c.slots_.assign(t_, 0.0);
  std::copy(plain.begin(), plain.end(), c.slots_.begin());
  c.level_ = params_.level_budget;
  c.id_ = next_id_++;
  c.shared_ = !local_context();
  charge([](CostLedger& l) { ++l.encryptions; });
  return c;
}

Ciphertext Backend::add(const Ciphertext& a, const Ciphertext& b) {
  Ciphertext r = derive(a, b);
  r.slots_.resize(t_);
  for (std::size_t i = 0; i < t_; ++i) r.slots_[i] = a.slots_[i] + b.slots_[i];
  r.id_ = next_id_++;
  charge([](CostLedger& l) { ++l.adds; });
  return r;
}

Ciphertext Backend::sub(const Ciphertext& a, const Ciphertext& b) {
  Ciphertext r = derive(a, b);
  r.slots_.resize(t_);
  for (std::size_t i = 0; i < t_; ++i) r.slots_[i] = a.slots_[i] - b.slots_[i];
  r.id_ = next_id_++;
  charge([](CostLedger& l) { ++l.adds; });
  return r;
}

Ciphertext Backend::add_plain(const Ciphertext& a, std::span<const double> p) {
  check_plain(p.size());
  Ciphertext r = derive(a);
  r.slots_ = a.slots_;
  for (std::size_t i = 0; i < p.size(); ++i) r.slots_[i] += p[i];
  r.id_ = next_id_++;
  charge([](CostLedger& l) { ++l.adds; });
  return r;
}

Ciphertext Backend::add_const(const Ciphertext& a, double c) {
  Ciphertext r = derive(a);
  r.slots_ = a.slots_;
  for (double& x : r.slots_) x += c;
  r.id_ = next_id_++;
  charge([](CostLedger& l) { ++l.adds; });
  return r;
}

Ciphertext Backend::negate(const Ciphertext& a) {
  Ciphertext r = derive(a);
  r.slots_ = a.slots_;
  for (double& x : r.slots_) x = -x;
  r.id_ = next_id_++;
  return r;
}

void Backend::count_mult(bool cc) {
  if (overhead_depth > 0) {
    charge([](CostLedger& l) { ++l.overhead_mults; });
  } else if (cc) {
    charge([](CostLedger& l) { ++l.mults_cc; });
  } else {
    charge([](CostLedger& l) { ++l.mults_pc; });
  }
}

Ciphertext Backend::mul_plain(const Ciphertext& a, std::span<const double> p) {
  check_plain(p.size());
  if (a.pending()) throw ProtocolError("sequential multiplication without maintenance");
  Ciphertext r = derive(a);
  r.slots_.assign(t_, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) r.slots_[i] = a.slots_[i] * p[i];
  r.pending_rescale_ = true;
  r.id_ = next_id_++;
  count_mult(false);
  return r;
}

Ciphertext Backend::mul_cipher(const Ciphertext& a, const Ciphertext& b) {
  if (a.pending() || b.pending()) throw ProtocolError("sequential multiplication without maintenance");
  Ciphertext r = derive(a, b);
  r.slots_.resize(t_);
  for (std::size_t i = 0; i < t_; ++i) r.slots_[i] = a.slots_[i] * b.slots_[i];
  r.pending_rescale_ = true;
  r.pending_relin_ = true;
  r.id_ = next_id_++;
  count_mult(true);
  return r;
}

Ciphertext Backend::mul_const(const Ciphertext& a, double c) {
  Ciphertext r = derive(a);
  r.slots_ = a.slots_;
  for (double& x : r.slots_) x *= c;
  r.id_ = next_id_++;
  charge([](CostLedger& l) { ++l.const_mults; });
  return r;
}

Ciphertext Backend::maintain(const Ciphertext& a) {
  if (!a.pending()) return a;
  Ciphertext r = a;
  if (a.pending_rescale_) {
    if (a.level_ <= 0) throw LevelError("level exhausted: maintenance at level 0 needs a bootstrap first");
    r.level_ = a.level_ - 1;
    charge([](CostLedger& l) { ++l.rescales; });
    if (params_.noise_std > 0) {
      std::normal_distribution<double> g(0.0, 1.0);
      for (double& x : r.slots_) x += params_.noise_std * std::abs(x) * g(rng_);
    }
  }
  if (a.pending_relin_) charge([](CostLedger& l) { ++l.relinearizations; });
  r.pending_rescale_ = false;
  r.pending_relin_ = false;
  r.id_ = next_id_++;
  return r;
}

Ciphertext Backend::drop_to(const Ciphertext& a, int level) {
  if (level > a.level_) throw ProtocolError("cannot raise a level without a bootstrap");
  if (level == a.level_) return a;
  Ciphertext r = a;
  r.level_ = level;
  r.id_ = next_id_++;
  charge([](CostLedger& l) { ++l.level_drops; });
  return r;
}

void Backend::count_rot(long y) {
  if (y == 0) return;
  auto k = static_cast<std::uint64_t>(std::popcount(static_cast<unsigned long>(std::labs(y))));
  if (overhead_depth > 0) {
    charge([k](CostLedger& l) { l.overhead_rotations += k; });
  } else {
    charge([k](CostLedger& l) {
      l.rotations += k;
      ++l.rotation_calls;
    });
  }
}

Ciphertext Backend::rotate(const Ciphertext& a, long y) {
  if (static_cast<std::size_t>(std::labs(y)) >= t_) throw CapacityError("rotation amount must satisfy |y| < t");
  if (a.slots_.size() != t_) throw ProtocolError("operand is not a valid ciphertext");
  Ciphertext r = derive(a);
  r.id_ = next_id_++;
  if (y == 0) {
    r.slots_ = a.slots_;
    return r;
  }
  auto T = static_cast<long>(t_);
  long s = ((y % T) + T) % T;
  r.slots_.resize(t_);
  std::rotate_copy(a.slots_.begin(), a.slots_.begin() + s, a.slots_.end(), r.slots_.begin());
  count_rot(y);
  return r;
}

Ciphertext Backend::sum_all(const Ciphertext& a) {
  Ciphertext r = a;
  for (int k = 0; k < log_t_; ++k) r = add(r, rotate(r, 1L << k));
  return r;
}

Ciphertext Backend::dot(const Ciphertext& a, const Ciphertext& b) {
  Ciphertext s = maintain(sum_all(mul_cipher(a, b)));
  return mul_plain(s, onehot(0));
}

Ciphertext Backend::dot(const Ciphertext& a, std::span<const double> p) {
  Ciphertext s = maintain(sum_all(mul_plain(a, p)));
  return mul_plain(s, onehot(0));
}

Ciphertext Backend::dup(const Ciphertext& a, std::size_t y) {
  if (y < 1 || y > t_) throw CapacityError("dup length must be in [1, t]");
  Ciphertext r = a;
  int steps = ceil_log2(y);
  for (int k = 0; k < steps; ++k) r = add(r, rotate(r, -(1L << k)));
  return r;
}

std::vector<double> Backend::onehot(std::size_t j) const {
  std::vector<double> v(t_, 0.0);
  v.at(j) = 1.0;
  return v;
}

std::vector<double> Backend::window(std::size_t lo, std::size_t hi) const {
  std::vector<double> v(t_, 0.0);
  for (std::size_t i = lo; i < hi && i < t_; ++i) v[i] = 1.0;
  return v;
}

Ciphertext Backend::refreshed(const Ciphertext& a) {
  Ciphertext r = a;
  r.level_ = params_.level_budget;
  r.id_ = next_id_++;
  return r;
}

Ciphertext Backend::retagged(const Ciphertext& a, int owner, bool shared) {
  Ciphertext r = a;
  r.owner_ = owner;
  r.shared_ = shared;
  r.id_ = next_id_++;
  return r;
}

Ciphertext Backend::overridden(const Ciphertext& traced, const Ciphertext& input,
                               const std::function<double(double)>& f) {
  Ciphertext r = traced;
  r.slots_.resize(t_);
  for (std::size_t i = 0; i < t_; ++i) r.slots_[i] = f(input.slots_[i]);
  if (params_.noise_std > 0) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& x : r.slots_) x += params_.noise_std * std::abs(x) * g(rng_);
  }
  r.id_ = next_id_++;
  return r;
}

std::vector<double> debug_decrypt(Backend& be, const Ciphertext& c) {
  be.charge([](CostLedger& l) { ++l.debug_reads; });
  return detail::SlotAccess::slots(c);
}

}  // namespace fedpca
