#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spinchain/model.hpp"

namespace spinchain {

inline constexpr int kExactEngineLimit = 14;

/// Dense effective rotating-frame Hamiltonian of one pulse: diagonal
/// ℰ_p (stored relative to the ground state, which shifts every phase
/// by a common factor that cancels within a pulse), off-diagonal -Ω/2
/// between states differing by one spin flip.
struct EffectiveHamiltonian {
  int length = 0;
  double coupling = 0.0;      // -Ω/2
  Eigen::VectorXd diagonal;   // ℰ_p - ℰ_ground, natural binary order

  Eigen::MatrixXd dense() const;
};

EffectiveHamiltonian build_effective_hamiltonian(const SpinSystem& sys,
                                                 const Pulse& pulse,
                                                 int limit = kExactEngineLimit);

/// Lab-frame C_p amplitudes through one pulse: frame transform in at t0,
/// eigen-propagation for tau, transform back at t0 + tau.
AmplitudeMap propagate_pulse(const AmplitudeMap& state, const SpinSystem& sys,
                             const Pulse& pulse, double t0,
                             int limit = kExactEngineLimit);

struct ExactRunResult {
  AmplitudeMap final_state;
  std::vector<double> norm_drift;  // |norm² - 1| after each pulse
};

ExactRunResult run_protocol_exact(const SpinSystem& sys,
                                  std::span<const Pulse> pulses,
                                  const AmplitudeMap& initial,
                                  int limit = kExactEngineLimit);

/// CSV dump (index, bit pattern, re, im) of a lab-frame amplitude map.
void dump_amplitudes_csv(const AmplitudeMap& state, const std::string& path);

}  // namespace spinchain
