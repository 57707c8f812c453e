#include "spinchain/twolevel.hpp"

#include <cmath>

namespace spinchain {

namespace {

// lambda - delta without cancellation when delta > 0.
double lambda_minus_delta(double lambda, double delta, double omega) {
  return delta > 0.0 ? omega * omega / (lambda + delta) : lambda - delta;
}

}  // namespace

BlockEigensystem block_eigensystem(const TwoLevelBlock& block) {
  const double omega = block.omega_rabi();
  const double lam = block.lambda;
  const double lmd = lambda_minus_delta(lam, block.delta, omega);
  const double norm = std::sqrt(lmd * lmd + omega * omega);

  BlockEigensystem e;
  e.e_lower = block.e_m + 0.5 * block.delta - 0.5 * lam;
  e.e_upper = block.e_m + 0.5 * block.delta + 0.5 * lam;
  e.lower_m = omega / norm;
  e.lower_p = lmd / norm;
  e.upper_m = -lmd / norm;
  e.upper_p = omega / norm;
  return e;
}

std::pair<std::complex<double>, std::complex<double>> propagate_block_amplitudes(
    const TwoLevelBlock& block, std::complex<double> c_m,
    std::complex<double> c_p, double t0, double tau) {
  using cplx = std::complex<double>;
  const cplx i{0.0, 1.0};
  const double omega = block.omega_rabi();
  const double lam = block.lambda;
  const double d = block.delta;
  const double half = 0.5 * lam * tau;
  const double c = std::cos(half), s = std::sin(half);

  const cplx stay_m = (c + i * (d / lam) * s) * std::exp(-i * (0.5 * tau * d));
  const cplx stay_p = (c - i * (d / lam) * s) * std::exp(i * (0.5 * tau * d));
  const cplx hop = i * (omega / lam) * s;
  const cplx to_p = hop * std::exp(i * (t0 * d + 0.5 * tau * d));
  const cplx to_m = hop * std::exp(-i * (t0 * d + 0.5 * tau * d));

  return {stay_m * c_m + to_m * c_p, to_p * c_m + stay_p * c_p};
}

std::pair<std::complex<double>, std::complex<double>> propagate_block(
    const TwoLevelBlock& block, BlockMember start, double t0, double tau) {
  if (tau < 0.0) throw std::invalid_argument("propagate_block: tau < 0");
  const std::complex<double> one{1.0, 0.0};
  if (start == BlockMember::m)
    return propagate_block_amplitudes(block, one, 0.0, t0, tau);
  return propagate_block_amplitudes(block, 0.0, one, t0, tau);
}

double epsilon(double omega_rabi, double delta, double tau) {
  if (omega_rabi <= 0.0)
    throw std::invalid_argument("epsilon: omega_rabi must be > 0");
  const double lam = std::hypot(omega_rabi, delta);
  const double s = std::sin(0.5 * lam * tau);
  const double r = omega_rabi / lam;
  return r * r * s * s;
}

double rabi_2pik(double delta, int k) {
  if (k < 1) throw std::invalid_argument("rabi_2pik: k must be >= 1");
  if (delta == 0.0) throw std::invalid_argument("rabi_2pik: delta must be nonzero");
  return std::abs(delta) / std::sqrt(4.0 * k * k - 1.0);
}

}  // namespace spinchain
