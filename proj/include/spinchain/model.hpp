#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "absl/container/flat_hash_map.h"
#include "absl/container/inlined_vector.h"
#include "absl/hash/hash.h"

namespace spinchain {

/// Raised when a request exceeds an engine's configured capacity
/// (e.g. a dense diagonalization above the exact-engine qubit limit).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised by the perturbative engine when an energy denominator falls
/// below the degeneracy floor.
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Open chain of L spins with Ising coupling J and a uniform Larmor
/// gradient: omega_k = omega0 + k * delta_omega.  All frequencies are
/// measured in units of J.
struct SpinSystem {
  int length = 1;              // L
  double delta_omega = 100.0;  // neighbor Larmor spacing, > 0
  double omega0 = 100.0;       // Larmor frequency of spin k = 0
  double ising_j = 1.0;        // J, the frequency unit

  SpinSystem() = default;
  SpinSystem(int L, double d_omega, double w0 = 100.0)
      : length(L), delta_omega(d_omega), omega0(w0) {
    if (length < 1) throw std::invalid_argument("SpinSystem: L must be >= 1");
    if (delta_omega <= 0.0)
      throw std::invalid_argument("SpinSystem: delta_omega must be > 0");
  }

  double omega(int k) const { return omega0 + k * delta_omega; }
};

/// One rectangular resonant pulse.
struct Pulse {
  double nu = 0.0;          // carrier frequency
  double omega_rabi = 0.0;  // Rabi frequency, > 0
  double tau = 0.0;         // duration, >= 0
  double phi = 0.0;         // initial phase (kept at 0 throughout)
};

/// Computational basis state of L spins, stored as the set of flipped
/// spins (|1>, sigma = -1) relative to the all-|0> ground state.  Spin
/// k = 0 is the rightmost in the |...> notation.  Sparse storage keeps
/// the type usable far beyond the 64-spin machine-word limit.
class BasisState {
 public:
  using FlipSet = absl::InlinedVector<std::uint16_t, 8>;

  BasisState() = default;

  static BasisState ground(int length) {
    BasisState s;
    s.length_ = length;
    return s;
  }

  /// Natural binary order: bit k of `index` set <=> spin k in |1>.
  static BasisState from_index(std::uint64_t index, int length) {
    if (length < 1 || length > 62)
      throw std::invalid_argument("BasisState: index form needs 1 <= L <= 62");
    if (index >> length)
      throw std::invalid_argument("BasisState: index out of range");
    BasisState s;
    s.length_ = length;
    for (int k = 0; k < length; ++k)
      if (index >> k & 1) s.flipped_.push_back(static_cast<std::uint16_t>(k));
    return s;
  }

  /// Parses e.g. "|01011>" or "01011"; the leftmost character is spin L-1.
  static BasisState from_bit_string(const std::string& bits);

  int length() const { return length_; }
  int flip_count() const { return static_cast<int>(flipped_.size()); }
  const FlipSet& flipped() const { return flipped_; }

  bool is_flipped(int k) const {
    for (auto f : flipped_)
      if (f == k) return true;
    return false;
  }

  /// +1 for |0>, -1 for |1>.
  int sigma(int k) const { return is_flipped(k) ? -1 : +1; }

  BasisState with_flip(int k) const {
    check_index(k);
    BasisState s(*this);
    auto it = s.flipped_.begin();
    while (it != s.flipped_.end() && *it < k) ++it;
    if (it != s.flipped_.end() && *it == k)
      s.flipped_.erase(it);
    else
      s.flipped_.insert(it, static_cast<std::uint16_t>(k));
    return s;
  }

  std::uint64_t to_index() const {
    if (length_ > 62)
      throw std::invalid_argument("BasisState: no index form for L > 62");
    std::uint64_t idx = 0;
    for (auto f : flipped_) idx |= std::uint64_t{1} << f;
    return idx;
  }

  std::string bit_string() const {
    std::string s(length_, '0');
    for (auto f : flipped_) s[length_ - 1 - f] = '1';
    return s;
  }

  friend bool operator==(const BasisState& a, const BasisState& b) {
    return a.length_ == b.length_ && a.flipped_ == b.flipped_;
  }

  template <typename H>
  friend H AbslHashValue(H h, const BasisState& s) {
    return H::combine(std::move(h), s.length_, s.flipped_);
  }

  void check_index(int k) const {
    if (k < 0 || k >= length_)
      throw std::out_of_range("BasisState: spin index out of range");
  }

 private:
  int length_ = 1;
  FlipSet flipped_;  // sorted ascending
};

enum class Frame { lab, rotating };

/// Sparse wavefunction: basis state -> complex amplitude.  Amplitudes
/// follow the C_p bookkeeping (global exp(-i E_p t) phases stripped)
/// when frame == lab, or the rotating-frame A_p when frame == rotating.
struct AmplitudeMap {
  using Map = absl::flat_hash_map<BasisState, std::complex<double>>;

  Frame frame = Frame::lab;
  Map entries;

  static AmplitudeMap ground(int length) {
    AmplitudeMap m;
    m.entries.emplace(BasisState::ground(length), 1.0);
    return m;
  }

  double norm_sq() const {
    double n = 0.0;
    for (const auto& [s, a] : entries) n += std::norm(a);
    return n;
  }

  std::complex<double> amplitude(const BasisState& s) const {
    auto it = entries.find(s);
    return it == entries.end() ? std::complex<double>{} : it->second;
  }
};

/// Diagonal energy E_p of H0 = -sum_k omega_k I_k^z - 2J sum_k I_k^z I_{k+1}^z
/// (open chain, I^z eigenvalues +-1/2).
double energy(const SpinSystem& sys, const BasisState& state);

/// E_p - E_ground; exact and free of large-number cancellation.
double energy_rel_ground(const SpinSystem& sys, const BasisState& state);

/// E(state with spin k flipped) - E(state).  Positive when the flip is an
/// upward transition.
double flip_energy_delta(const SpinSystem& sys, const BasisState& state, int k);

/// chi_p = -(nu/2) sum_k sigma_k; the rotating-frame diagonal is
/// E_p - chi_p.
double rotating_shift(const SpinSystem& sys, const BasisState& state,
                      double nu);

/// Signed resonance frequency of the spin-k transition out of `state`:
/// nu = E(flipped) - E(state).  Satisfies
/// resonance_frequency(state, k) == -resonance_frequency(flipped, k).
double resonance_frequency(const SpinSystem& sys, const BasisState& state,
                           int k);

/// (E_p - chi_p) - (E_g - chi_g): effective rotating-frame diagonal
/// relative to the ground state, the quantity every propagator uses.
double effective_energy_rel_ground(const SpinSystem& sys,
                                   const BasisState& state, double nu);

}  // namespace spinchain
