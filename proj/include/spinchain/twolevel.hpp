#pragma once

#include <complex>
#include <utility>

#include "spinchain/model.hpp"

namespace spinchain {

/// One resonant 2x2 block of the effective Hamiltonian,
///   [ e_m      v    ]
///   [ v    e_m + Δ  ]
/// over the pair {|m>, |p>}, with v = -Ω/2 and λ = sqrt(Ω² + Δ²).
struct TwoLevelBlock {
  double e_m = 0.0;     // diagonal element of |m>
  double delta = 0.0;   // detuning Δ = ℰ_p - ℰ_m
  double v = 0.0;       // coupling, -Ω/2
  double lambda = 0.0;  // sqrt(Ω² + Δ²)

  static TwoLevelBlock make(double e_m, double delta, double omega_rabi) {
    if (omega_rabi <= 0.0)
      throw std::invalid_argument("TwoLevelBlock: omega_rabi must be > 0");
    TwoLevelBlock b;
    b.e_m = e_m;
    b.delta = delta;
    b.v = -0.5 * omega_rabi;
    b.lambda = std::hypot(omega_rabi, delta);
    return b;
  }

  double omega_rabi() const { return -2.0 * v; }
};

enum class BlockMember { m, p };

/// Closed-form eigensystem of a block.  Components are over (|m>, |p>);
/// `lower` has eigenvalue e_m + Δ/2 - λ/2, `upper` e_m + Δ/2 + λ/2.
struct BlockEigensystem {
  double e_lower = 0.0, e_upper = 0.0;
  double lower_m = 0.0, lower_p = 0.0;  // ψ_q
  double upper_m = 0.0, upper_p = 0.0;  // ψ_Q
};

BlockEigensystem block_eigensystem(const TwoLevelBlock& block);

/// Evolves lab-frame amplitudes (C_m, C_p) through one pulse of duration
/// tau starting at absolute time t0.  All rotating-frame transforms are
/// folded in; only the detuning enters the phases, so the result is safe
/// at large absolute energies.
std::pair<std::complex<double>, std::complex<double>> propagate_block_amplitudes(
    const TwoLevelBlock& block, std::complex<double> c_m,
    std::complex<double> c_p, double t0, double tau);

/// Same, starting from a pure |m> or |p> state.
std::pair<std::complex<double>, std::complex<double>> propagate_block(
    const TwoLevelBlock& block, BlockMember start, double t0, double tau);

/// Near-resonant transition probability ε = (Ω/λ)² sin²(λτ/2).
double epsilon(double omega_rabi, double delta, double tau);

/// 2πk-method Rabi frequency Ω^(k) = |Δ| / sqrt(4k² - 1): a resonant
/// π-pulse of duration π/Ω^(k) then has ε = 0 at detuning Δ.
double rabi_2pik(double delta, int k);

}  // namespace spinchain
