#include "spinchain/protocol.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spinchain/twolevel.hpp"

namespace spinchain {

namespace {

// Spins flipped by pulses 2..2L-2, in order: L-2, then (j, j+1) for
// j = L-3 down to 0.  Applied after the first pulse this walks
// |10...0> to |10...01> without revisiting a state.
std::vector<int> walk_spins(int length) {
  std::vector<int> spins;
  spins.push_back(length - 2);
  for (int j = length - 3; j >= 0; --j) {
    spins.push_back(j);
    spins.push_back(j + 1);
  }
  return spins;
}

}  // namespace

ProtocolPlan generate_protocol(const SpinSystem& sys, double omega_rabi,
                               std::optional<int> k_2pik) {
  const int L = sys.length;
  if (L < 3)
    throw std::invalid_argument("generate_protocol: needs L >= 3");
  if (k_2pik)
    omega_rabi = rabi_2pik(2.0 * sys.ising_j, *k_2pik);
  if (omega_rabi <= 0.0)
    throw std::invalid_argument("generate_protocol: omega_rabi must be > 0");

  ProtocolPlan plan;
  plan.length = L;
  plan.omega_rabi = omega_rabi;
  plan.steps.reserve(2 * L - 2);

  const BasisState ground = BasisState::ground(L);
  const double pi = std::numbers::pi;

  // Pulse 1: π/2 on the edge spin, resonant with the ground state.
  {
    ProtocolStep s;
    s.resonant_spin = L - 1;
    s.source = ground;
    s.target = ground.with_flip(L - 1);
    s.pulse.nu = resonance_frequency(sys, ground, L - 1);
    s.pulse.omega_rabi = omega_rabi;
    s.pulse.tau = pi / (2.0 * omega_rabi);
    s.bystander_delta = 0.0;
    plan.steps.push_back(std::move(s));
  }

  BasisState branch = ground.with_flip(L - 1);
  int n = 2;
  for (int k : walk_spins(L)) {
    ProtocolStep s;
    s.resonant_spin = k;
    s.source = branch;
    s.target = branch.with_flip(k);
    s.pulse.nu = std::abs(resonance_frequency(sys, branch, k));
    s.pulse.omega_rabi = (n == 4) ? 2.0 * omega_rabi : omega_rabi;
    s.pulse.tau = pi / s.pulse.omega_rabi;
    s.bystander_delta = resonance_frequency(sys, ground, k) - s.pulse.nu;
    branch = s.target;
    plan.steps.push_back(std::move(s));
    ++n;
  }

  plan.target_state = branch;
  return plan;
}

ProtocolOutcome evaluate_outcome(const AmplitudeMap& final_state,
                                 const ProtocolPlan& plan) {
  const auto c0 = final_state.amplitude(BasisState::ground(plan.length));
  const auto ct = final_state.amplitude(plan.target_state);
  ProtocolOutcome out;
  out.error_probability = 1.0 - std::norm(c0) - std::norm(ct);
  out.phi1 = std::arg(c0);
  out.phi2 = std::arg(ct) - out.phi1;
  return out;
}

std::string plan_table(const ProtocolPlan& plan) {
  std::ostringstream os;
  os << "# n  nu  omega  tau  spin  transition\n";
  int n = 1;
  for (const auto& s : plan.steps) {
    char line[256];
    std::snprintf(line, sizeof line, "%4d  %.12g  %.12g  %.12g  %d  |%s> -> |%s>\n",
                  n++, s.pulse.nu, s.pulse.omega_rabi, s.pulse.tau,
                  s.resonant_spin, s.source.bit_string().c_str(),
                  s.target.bit_string().c_str());
    os << line;
  }
  return os.str();
}

std::string plan_json(const ProtocolPlan& plan) {
  nlohmann::json j;
  j["L"] = plan.length;
  j["omega_rabi"] = plan.omega_rabi;
  j["target_state"] = plan.target_state.bit_string();
  auto& pulses = j["pulses"] = nlohmann::json::array();
  for (const auto& s : plan.steps) {
    pulses.push_back({{"nu", s.pulse.nu},
                      {"omega_rabi", s.pulse.omega_rabi},
                      {"tau", s.pulse.tau},
                      {"resonant_spin", s.resonant_spin},
                      {"source", s.source.bit_string()},
                      {"target", s.target.bit_string()},
                      {"bystander_delta", s.bystander_delta}});
  }
  return j.dump(2);
}

}  // namespace spinchain
