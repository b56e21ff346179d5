// Copyright 2026 The fedpca Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fedpca/common.hpp"
#include "fedpca/ledger.hpp"
#include "fedpca/params.hpp"

namespace fedpca {

namespace detail {
struct SlotAccess;
}

inline constexpr int kCollectiveKey = -1;

class Ciphertext {
 public:
  Ciphertext() = default;

  int level() const { return level_; }
  bool pending_rescale() const { return pending_rescale_; }
  bool pending_relin() const { return pending_relin_; }
  bool pending() const { return pending_rescale_ || pending_relin_; }
  std::uint64_t provenance_id() const { return id_; }
  int owner() const { return owner_; }
  bool shared() const { return shared_; }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }

 private:
  friend class Backend;
  friend struct detail::SlotAccess;

  std::vector<double> slots_;
  int level_ = 0;
  bool pending_rescale_ = false;
  bool pending_relin_ = false;
  std::uint64_t id_ = 0;
  int owner_ = kCollectiveKey;
  bool shared_ = true;
};

enum class BarrierKind { KeyGen, Aggregate, Bootstrap, KeySwitch };

struct BarrierEvent {
  std::string step;
  BarrierKind kind;
  double payload_ciphertexts;
  int parties;
};

// Transparent tracing backend: cleartext slots, homomorphic cost semantics.
class Backend {
 public:
  explicit Backend(CryptoParams params, int parties = 1);

  const CryptoParams& params() const { return params_; }
  std::size_t slots() const { return t_; }
  int log_slots() const { return log_t_; }
  int parties() const { return book_.parties(); }
  int max_level() const { return params_.level_budget; }

  LedgerBook& book() { return book_; }
  const LedgerBook& book() const { return book_; }
  const std::vector<BarrierEvent>& barriers() const { return barriers_; }
  void record_barrier(BarrierKind kind, double payload);

  const std::string& step() const { return step_; }
  void set_step(std::string s) { step_ = std::move(s); }
  const std::vector<int>& actors() const { return actors_; }
  void set_actors(std::vector<int> a);
  std::vector<int> all_parties() const;
  bool local_context() const { return parties() > 1 && actors_.size() == 1; }

  void charge(const std::function<void(CostLedger&)>& f);
  void charge_party(int party, const std::function<void(CostLedger&)>& f);
  // Closed-form communication; muted inside routines that charge their own formula.
  void charge_model(double ciphertexts);
  int overhead_depth = 0;
  Topology topology = Topology::Ring;
  int model_mute_depth = 0;

  Ciphertext encrypt(std::span<const double> plain);
  Ciphertext encrypt(const std::vector<double>& plain) { return encrypt(std::span<const double>(plain)); }
  Ciphertext encrypt_zero() { return encrypt(std::span<const double>()); }

  Ciphertext add(const Ciphertext& a, const Ciphertext& b);
  Ciphertext sub(const Ciphertext& a, const Ciphertext& b);
  Ciphertext add_plain(const Ciphertext& a, std::span<const double> p);
  Ciphertext add_const(const Ciphertext& a, double c);
  Ciphertext negate(const Ciphertext& a);
  Ciphertext mul_plain(const Ciphertext& a, std::span<const double> p);
  Ciphertext mul_plain(const Ciphertext& a, const std::vector<double>& p) {
    return mul_plain(a, std::span<const double>(p));
  }
  Ciphertext mul_cipher(const Ciphertext& a, const Ciphertext& b);
  // scalar encoded into the modulus; no level, not a Mult
  Ciphertext mul_const(const Ciphertext& a, double c);
  Ciphertext maintain(const Ciphertext& a);
  // modulus drop to a lower level; free apart from bookkeeping
  Ciphertext drop_to(const Ciphertext& a, int level);
  Ciphertext rotate(const Ciphertext& a, long y);

  Ciphertext dot(const Ciphertext& a, const Ciphertext& b);
  Ciphertext dot(const Ciphertext& a, std::span<const double> p);
  Ciphertext dup(const Ciphertext& a, std::size_t y);
  // log2(t) rotate-and-add steps; every slot ends up with the total
  Ciphertext sum_all(const Ciphertext& a);

  std::vector<double> onehot(std::size_t j) const;
  std::vector<double> window(std::size_t lo, std::size_t hi) const;

  // protocol hooks used by the collective layer
  Ciphertext refreshed(const Ciphertext& a);
  Ciphertext retagged(const Ciphertext& a, int owner, bool shared);
  // keeps the traced metadata of `traced`, replaces slots with f(input slots)
  Ciphertext overridden(const Ciphertext& traced, const Ciphertext& input, const std::function<double(double)>& f);

 private:
  Ciphertext derive(const Ciphertext& a) const;
  Ciphertext derive(const Ciphertext& a, const Ciphertext& b);
  void check_plain(std::size_t n) const;
  void count_mult(bool cc);
  void count_rot(long y);

  CryptoParams params_;
  std::size_t t_;
  int log_t_;
  LedgerBook book_;
  std::vector<BarrierEvent> barriers_;
  std::string step_ = "default";
  std::vector<int> actors_;
  std::mt19937_64 rng_;
  std::uint64_t next_id_ = 1;
};

class StepScope {
 public:
  StepScope(Backend& be, std::string step) : be_(be), prev_(be.step()) { be.set_step(std::move(step)); }
  ~StepScope() { be_.set_step(prev_); }
  StepScope(const StepScope&) = delete;
  StepScope& operator=(const StepScope&) = delete;

 private:
  Backend& be_;
  std::string prev_;
};

class ActorScope {
 public:
  ActorScope(Backend& be, std::vector<int> actors) : be_(be), prev_(be.actors()) {
    be.set_actors(std::move(actors));
  }
  ~ActorScope() { be_.set_actors(prev_); }
  ActorScope(const ActorScope&) = delete;
  ActorScope& operator=(const ActorScope&) = delete;

 private:
  Backend& be_;
  std::vector<int> prev_;
};

class OverheadScope {
 public:
  explicit OverheadScope(Backend& be) : be_(be) { ++be_.overhead_depth; }
  ~OverheadScope() { --be_.overhead_depth; }
  OverheadScope(const OverheadScope&) = delete;
  OverheadScope& operator=(const OverheadScope&) = delete;

 private:
  Backend& be_;
};

class ModelMute {
 public:
  explicit ModelMute(Backend& be) : be_(be) { ++be_.model_mute_depth; }
  ~ModelMute() { --be_.model_mute_depth; }
  ModelMute(const ModelMute&) = delete;
  ModelMute& operator=(const ModelMute&) = delete;

 private:
  Backend& be_;
};

namespace detail {
struct SlotAccess {
  static const std::vector<double>& slots(const Ciphertext& c) { return c.slots_; }
};
}  // namespace detail

}  // namespace fedpca
