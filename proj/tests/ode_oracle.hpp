#pragma once

#include <boost/numeric/odeint.hpp>
#include <complex>
#include <utility>
#include <vector>

namespace spinchain::testing {

// Independent oracle: adaptive integration of the two-level rotating-frame
// Schroedinger equation  i dA/dt = H A,  H = [[0, -Ω/2], [-Ω/2, Δ]],
// with the lab-frame transform applied outside.
inline std::pair<std::complex<double>, std::complex<double>> ode_oracle(
    double omega, double delta, double t0, double tau,
    std::complex<double> c_m, std::complex<double> c_p) {
  using cplx = std::complex<double>;
  using state_t = std::vector<cplx>;
  const cplx i1{0.0, 1.0};
  state_t a{c_m, c_p * std::exp(-i1 * (delta * t0))};
  auto rhs = [&](const state_t& y, state_t& dydt, double) {
    dydt[0] = -i1 * (-0.5 * omega * y[1]);
    dydt[1] = -i1 * (delta * y[1] - 0.5 * omega * y[0]);
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<state_t>>(
      1e-13, 1e-13);
  ode::integrate_adaptive(stepper, rhs, a, 0.0, tau, 1e-3 * tau + 1e-12);
  const double t1 = t0 + tau;
  return {a[0], a[1] * std::exp(i1 * (delta * t1))};
}

}  // namespace spinchain::testing
