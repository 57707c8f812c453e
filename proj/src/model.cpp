#include "spinchain/model.hpp"

namespace spinchain {

BasisState BasisState::from_bit_string(const std::string& bits) {
  std::string body = bits;
  if (!body.empty() && body.front() == '|') body.erase(body.begin());
  if (!body.empty() && body.back() == '>') body.pop_back();
  if (body.empty()) throw std::invalid_argument("BasisState: empty bit string");
  BasisState s;
  s.length_ = static_cast<int>(body.size());
  for (int k = 0; k < s.length_; ++k) {
    char c = body[body.size() - 1 - k];
    if (c == '1')
      s.flipped_.push_back(static_cast<std::uint16_t>(k));
    else if (c != '0')
      throw std::invalid_argument("BasisState: bad character in bit string");
  }
  return s;
}

namespace {

void check_state(const SpinSystem& sys, const BasisState& state) {
  if (state.length() != sys.length)
    throw std::invalid_argument("state length does not match system length");
}

}  // namespace

double energy_rel_ground(const SpinSystem& sys, const BasisState& state) {
  check_state(sys, state);
  // Each flipped spin contributes +omega_k; each Ising bond with exactly
  // one flipped end contributes +J relative to the fully aligned chain.
  double e = 0.0;
  int boundary_bonds = 0;
  const auto& flips = state.flipped();
  for (std::size_t i = 0; i < flips.size(); ++i) {
    int k = flips[i];
    e += sys.omega(k);
    if (k > 0 && !(i > 0 && flips[i - 1] == k - 1)) ++boundary_bonds;
    if (k + 1 < sys.length &&
        !(i + 1 < flips.size() && flips[i + 1] == k + 1))
      ++boundary_bonds;
  }
  return e + sys.ising_j * boundary_bonds;
}

double energy(const SpinSystem& sys, const BasisState& state) {
  check_state(sys, state);
  const int L = sys.length;
  // E_ground = -(1/2) sum_k omega_k - (J/2)(L-1).
  const double sum_omega =
      L * sys.omega0 + sys.delta_omega * 0.5 * L * (L - 1);
  const double e_ground = -0.5 * sum_omega - 0.5 * sys.ising_j * (L - 1);
  return e_ground + energy_rel_ground(sys, state);
}

double flip_energy_delta(const SpinSystem& sys, const BasisState& state,
                         int k) {
  check_state(sys, state);
  state.check_index(k);
  const int s = state.sigma(k);
  int neighbors = 0;
  if (k > 0) neighbors += state.sigma(k - 1);
  if (k + 1 < sys.length) neighbors += state.sigma(k + 1);
  return s * (sys.omega(k) + sys.ising_j * neighbors);
}

double rotating_shift(const SpinSystem& sys, const BasisState& state,
                      double nu) {
  check_state(sys, state);
  const int sum_sigma = sys.length - 2 * state.flip_count();
  return -0.5 * nu * sum_sigma;
}

double resonance_frequency(const SpinSystem& sys, const BasisState& state,
                           int k) {
  return flip_energy_delta(sys, state, k);
}

double effective_energy_rel_ground(const SpinSystem& sys,
                                   const BasisState& state, double nu) {
  // chi_p - chi_ground = nu * (number of flipped spins).
  return energy_rel_ground(sys, state) - nu * state.flip_count();
}

}  // namespace spinchain
