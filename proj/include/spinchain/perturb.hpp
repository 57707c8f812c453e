#pragma once

#include <span>
#include <utility>
#include <vector>

#include "spinchain/model.hpp"
#include "spinchain/protocol.hpp"
#include "spinchain/twolevel.hpp"

namespace spinchain {

// ---------------------------------------------------------------------------
// Closed-form first-order error estimator (no state vectors).
// ---------------------------------------------------------------------------

/// Probability of the unwanted flip of spin k_other while spin k_res is
/// driven: (Ω/2)² / ((k_res - k_other) δω)².
double nonresonant_probability(int k_res, int k_other, double omega_rabi,
                               double delta_omega);

/// μ_n: non-resonant error of one pulse, summed over all L-1 bystander
/// spins, μ · Σ_{k' != k_res} 1/|k_res - k'|².
double mu_for_pulse(const SpinSystem& sys, int k_res, double omega_rabi);

struct PulseError {
  double epsilon = 0.0;  // near-resonant transition probability
  double mu = 0.0;       // non-resonant transition probability
};

/// P = 1 - (1/2)Π(1-μ_n) - (1/2)Π(1-μ_n-ε_n) over the pulse list.
double total_error(std::span<const PulseError> per_pulse);

struct ErrorBudget {
  std::vector<PulseError> per_pulse;
  double total_p = 0.0;
  double mu_unit = 0.0;  // (Ω/2δω)² at the plan's base Ω

  std::string json() const;
};

/// Per-pulse (ε_n, μ_n) of a protocol plan plus the total of the product
/// formula.  ε_1 = 0; ε_n for n >= 2 is the ground-branch value.
ErrorBudget error_budget_for_plan(const SpinSystem& sys,
                                  const ProtocolPlan& plan);

// ---------------------------------------------------------------------------
// Improved perturbation theory: 2L-term eigenvectors, 2nd-order energies.
// ---------------------------------------------------------------------------

/// Approximate eigenstate of the full effective Hamiltonian anchored at
/// one 2x2 block: the block eigenvector plus first-order admixtures
/// from every block reachable by one non-resonant spin flip, support
/// <= 2L basis states, renormalized; `energy2` carries the second-order
/// eigenvalue (relative to the ground-state diagonal).
struct ExpandedEigenstate {
  BlockMember anchor = BlockMember::m;
  double energy2 = 0.0;
  std::vector<std::pair<BasisState, double>> coefficients;
};

/// The resonant spin a carrier frequency addresses (nearest Larmor line).
int resonant_spin_for(const SpinSystem& sys, double nu);

/// Builds the expanded eigenstate anchored at the block {m_state,
/// m_state with spin k_res flipped}; `which` selects the lower (q) or
/// upper (Q) block eigenvector.
ExpandedEigenstate expanded_eigenstate(const SpinSystem& sys,
                                       const Pulse& pulse,
                                       const BasisState& m_state, int k_res,
                                       BlockMember which,
                                       double degeneracy_floor_rel = 1e-6);

struct ImprovedOptions {
  double truncation_floor = 1e-14;    // probability below which entries drop
  std::size_t support_cap = 40'000'000;
  double heavy_safety = 4.0;          // expansion threshold w·μ·safety >= floor
  double degeneracy_floor_rel = 1e-6; // in units of δω
};

struct ImprovedStats {
  double pruned_mass = 0.0;
  std::size_t max_support = 0;
};

/// One pulse of sparse propagation: pairs support states into 2x2
/// blocks under the pulse's resonant spin, applies the analytic block
/// propagator, and for blocks heavy enough that their leakage could
/// survive truncation, propagates through the two expanded eigenstates
/// with second-order energies.  Entries below the truncation floor are
/// dropped and their probability mass recorded.
AmplitudeMap improved_propagate(const AmplitudeMap& state,
                                const SpinSystem& sys, const Pulse& pulse,
                                double t0, const ImprovedOptions& opts = {},
                                ImprovedStats* stats = nullptr);

struct ImprovedRunResult {
  AmplitudeMap final_state;
  ImprovedStats stats;
};

ImprovedRunResult run_protocol_improved(const SpinSystem& sys,
                                        const ProtocolPlan& plan,
                                        const ImprovedOptions& opts = {});

}  // namespace spinchain
