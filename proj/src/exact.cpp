#include "spinchain/exact.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include <lapacke.h>

namespace spinchain {

namespace {

// ℰ_p - ℰ_ground for basis index `idx` under carrier frequency nu.
double effective_diag(const SpinSystem& sys, std::uint64_t idx, double nu) {
  double e = 0.0;
  std::uint64_t bits = idx;
  while (bits) {
    int k = std::countr_zero(bits);
    bits &= bits - 1;
    e += sys.omega(k);
  }
  const std::uint64_t bond_mask = (std::uint64_t{1} << (sys.length - 1)) - 1;
  const int boundary = std::popcount((idx ^ (idx >> 1)) & bond_mask);
  return e + sys.ising_j * boundary - nu * std::popcount(idx);
}

void check_capacity(int length, int limit) {
  if (length > limit)
    throw CapacityError(
        "exact engine: L exceeds the dense-diagonalization limit; "
        "use the perturbative engine");
}

}  // namespace

Eigen::MatrixXd EffectiveHamiltonian::dense() const {
  const std::uint64_t dim = std::uint64_t{1} << length;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint64_t i = 0; i < dim; ++i) {
    h(i, i) = diagonal(i);
    for (int k = 0; k < length; ++k)
      h(i, i ^ (std::uint64_t{1} << k)) = coupling;
  }
  return h;
}

EffectiveHamiltonian build_effective_hamiltonian(const SpinSystem& sys,
                                                 const Pulse& pulse,
                                                 int limit) {
  check_capacity(sys.length, limit);
  if (pulse.omega_rabi <= 0.0)
    throw std::invalid_argument("build_effective_hamiltonian: omega_rabi <= 0");
  const std::uint64_t dim = std::uint64_t{1} << sys.length;
  EffectiveHamiltonian h;
  h.length = sys.length;
  h.coupling = -0.5 * pulse.omega_rabi;
  h.diagonal.resize(dim);
  for (std::uint64_t i = 0; i < dim; ++i)
    h.diagonal(i) = effective_diag(sys, i, pulse.nu);
  return h;
}

AmplitudeMap propagate_pulse(const AmplitudeMap& state, const SpinSystem& sys,
                             const Pulse& pulse, double t0, int limit) {
  check_capacity(sys.length, limit);
  if (state.frame != Frame::lab)
    throw std::invalid_argument("propagate_pulse: expected lab-frame input");
  if (std::abs(state.norm_sq() - 1.0) > 1e-8)
    throw std::invalid_argument("propagate_pulse: state is not normalized");

  const std::uint64_t dim = std::uint64_t{1} << sys.length;
  const EffectiveHamiltonian h = build_effective_hamiltonian(sys, pulse, limit);
  const std::complex<double> i1{0.0, 1.0};

  // Lab -> rotating at t0.
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(dim);
  for (const auto& [s, amp] : state.entries)
    a(s.to_index()) = amp;
  for (std::uint64_t p = 0; p < dim; ++p)
    a(p) *= std::exp(-i1 * (h.diagonal(p) * t0));

  // Eigen-propagation for tau.
  Eigen::MatrixXd w = h.dense();
  Eigen::VectorXd evals(dim);
  const lapack_int n = static_cast<lapack_int>(dim);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, w.data(), n,
                                   evals.data());
  if (info != 0)
    throw std::runtime_error("propagate_pulse: dsyevd failed");

  Eigen::VectorXcd c = w.transpose() * a;
  for (std::uint64_t q = 0; q < dim; ++q)
    c(q) *= std::exp(-i1 * (evals(q) * pulse.tau));
  a = w * c;

  // Rotating -> lab at t0 + tau.
  const double t1 = t0 + pulse.tau;
  AmplitudeMap out;
  out.frame = Frame::lab;
  out.entries.reserve(dim);
  for (std::uint64_t p = 0; p < dim; ++p) {
    const std::complex<double> amp = a(p) * std::exp(i1 * (h.diagonal(p) * t1));
    if (std::norm(amp) > 0.0)
      out.entries.emplace(BasisState::from_index(p, sys.length), amp);
  }
  return out;
}

ExactRunResult run_protocol_exact(const SpinSystem& sys,
                                  std::span<const Pulse> pulses,
                                  const AmplitudeMap& initial, int limit) {
  ExactRunResult r;
  r.final_state = initial;
  r.norm_drift.reserve(pulses.size());
  double t = 0.0;
  for (const Pulse& p : pulses) {
    r.final_state = propagate_pulse(r.final_state, sys, p, t, limit);
    t += p.tau;
    r.norm_drift.push_back(std::abs(r.final_state.norm_sq() - 1.0));
  }
  return r;
}

void dump_amplitudes_csv(const AmplitudeMap& state, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "index,bits,re,im\n");
  std::vector<const BasisState*> order;
  order.reserve(state.entries.size());
  for (const auto& [s, a] : state.entries) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const BasisState* a, const BasisState* b) {
              return a->to_index() < b->to_index();
            });
  for (const BasisState* s : order) {
    const auto a = state.amplitude(*s);
    std::fprintf(f, "%llu,%s,%.12g,%.12g\n",
                 static_cast<unsigned long long>(s->to_index()),
                 s->bit_string().c_str(), a.real(), a.imag());
  }
  std::fclose(f);
}

}  // namespace spinchain
