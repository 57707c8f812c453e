#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinchain/model.hpp"

namespace spinchain {

/// One step of the entanglement protocol: the pulse, which spin it
/// flips, the intended transition on the walking branch, and the
/// detuning the ground-state branch sees.
struct ProtocolStep {
  Pulse pulse;
  int resonant_spin = 0;
  BasisState source;         // intended |source> -> |target> transition
  BasisState target;
  double bystander_delta = 0.0;  // Δ_n of the ground-state branch
};

/// The 2L-2 pulse sequence that carries |10...0> to |10...01> and turns
/// the ground state + first-pulse superposition into the remote-qubit
/// entangled state.
struct ProtocolPlan {
  int length = 0;
  double omega_rabi = 0.0;   // base Ω (pulse 4 uses 2Ω)
  std::vector<ProtocolStep> steps;
  BasisState target_state;   // |10...01>

  std::vector<Pulse> pulses() const {
    std::vector<Pulse> p;
    p.reserve(steps.size());
    for (const auto& s : steps) p.push_back(s.pulse);
    return p;
  }
};

/// Builds the plan.  Pulse 1 is a π/2-pulse on the edge spin L-1; the
/// rest are resonant π-pulses walking the flipped domain to spin 0.
/// Frequencies come from exact H0 energy differences.  If k_2pik is
/// given, Ω is replaced by the 2πk value for detuning 2J.
ProtocolPlan generate_protocol(const SpinSystem& sys, double omega_rabi,
                               std::optional<int> k_2pik = std::nullopt);

struct ProtocolOutcome {
  double error_probability = 0.0;  // P = 1 - |<0|f>|² - |<target|f>|²
  double phi1 = 0.0;               // arg <0...0|f>
  double phi2 = 0.0;               // arg <target|f> - phi1
};

ProtocolOutcome evaluate_outcome(const AmplitudeMap& final_state,
                                 const ProtocolPlan& plan);

/// Human-readable table: pulse index, ν, Ω, τ, resonant spin, transition.
std::string plan_table(const ProtocolPlan& plan);

/// JSON form for replay.
std::string plan_json(const ProtocolPlan& plan);

}  // namespace spinchain
