#include <doctest.h>

#include <complex>
#include <numbers>
#include <set>

#include "spinchain/protocol.hpp"
#include "spinchain/twolevel.hpp"

using namespace spinchain;
using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

TEST_CASE("plan shape") {
  SUBCASE("L=3 walk and detunings") {
    SpinSystem sys(3, 100.0);
    const auto plan = generate_protocol(sys, 0.2);
    REQUIRE(plan.steps.size() == 4);
    CHECK(plan.steps[0].source.bit_string() == "000");
    CHECK(plan.steps[0].target.bit_string() == "100");
    CHECK(plan.steps[1].target.bit_string() == "110");
    CHECK(plan.steps[2].target.bit_string() == "111");
    CHECK(plan.steps[3].target.bit_string() == "101");
    CHECK(plan.target_state.bit_string() == "101");
    CHECK(plan.steps[0].bystander_delta == 0.0);
    CHECK(plan.steps[1].bystander_delta == doctest::Approx(2.0));
    CHECK(plan.steps[2].bystander_delta == doctest::Approx(2.0));
    CHECK(plan.steps[3].bystander_delta == doctest::Approx(4.0));
  }
  SUBCASE("M = 2L-2 and the remote target state") {
    for (int L : {3, 4, 5, 8, 12}) {
      SpinSystem sys(L, 100.0);
      const auto plan = generate_protocol(sys, 0.2);
      CHECK(static_cast<int>(plan.steps.size()) == 2 * L - 2);
      std::string want(L, '0');
      want.front() = '1';
      want.back() = '1';
      CHECK(plan.target_state.bit_string() == want);
    }
  }
  SUBCASE("L < 3 rejected") {
    SpinSystem sys(2, 100.0);
    CHECK_THROWS_AS(generate_protocol(sys, 0.2), std::invalid_argument);
  }
  SUBCASE("2pi-k override sets omega") {
    SpinSystem sys(5, 100.0);
    const auto plan = generate_protocol(sys, 0.7, 3);
    CHECK(plan.omega_rabi == doctest::Approx(rabi_2pik(2.0, 3)).epsilon(1e-14));
  }
}

TEST_CASE("plan invariants") {
  for (int L : {4, 5, 7, 10}) {
    SpinSystem sys(L, 250.0);
    const double omega = 0.3;
    const auto plan = generate_protocol(sys, omega);
    const auto ground = BasisState::ground(L);

    std::set<std::string> visited;
    visited.insert(plan.steps[0].source.bit_string());
    int n = 1;
    for (const auto& s : plan.steps) {
      // The walk chains and never revisits a state.
      if (n >= 2) CHECK(s.source == plan.steps[n - 2].target);
      CHECK(visited.insert(s.target.bit_string()).second);
      CHECK(s.target == s.source.with_flip(s.resonant_spin));

      // Resonance by construction: ν equals the H0 energy difference.
      CHECK(std::abs(resonance_frequency(sys, s.source, s.resonant_spin)) ==
            doctest::Approx(s.pulse.nu).epsilon(1e-13));

      // Ground-branch detuning 2J, except pulse 4 with 4J; and the
      // matched Rabi frequencies Ω_4 = 2Ω.
      if (n >= 2) {
        const double want = (n == 4) ? 4.0 : 2.0;
        CHECK(s.bystander_delta == doctest::Approx(want).epsilon(1e-12));
        CHECK(s.pulse.omega_rabi ==
              doctest::Approx(n == 4 ? 2 * omega : omega).epsilon(1e-14));
        CHECK(s.pulse.tau ==
              doctest::Approx(pi / s.pulse.omega_rabi).epsilon(1e-14));
        const double res = resonance_frequency(sys, ground, s.resonant_spin);
        CHECK(s.bystander_delta ==
              doctest::Approx(res - s.pulse.nu).epsilon(1e-12));
      } else {
        CHECK(s.pulse.tau == doctest::Approx(pi / (2 * omega)).epsilon(1e-14));
      }
      ++n;
    }
  }
}

TEST_CASE("outcome evaluation") {
  SpinSystem sys(5, 100.0);
  const auto plan = generate_protocol(sys, 0.2);
  const double r = 1.0 / std::sqrt(2.0);

  SUBCASE("ideal final state has P = 0 and the injected phase") {
    const double phi = 0.77;
    AmplitudeMap f;
    f.entries.emplace(BasisState::ground(5), cplx{r, 0.0});
    f.entries.emplace(plan.target_state,
                      r * std::exp(cplx{0.0, 1.0} * phi));
    const auto out = evaluate_outcome(f, plan);
    CHECK(out.error_probability == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(out.phi1 == doctest::Approx(0.0));
    CHECK(out.phi2 == doctest::Approx(phi).epsilon(1e-13));
  }
  SUBCASE("leaked probability shows up in P") {
    AmplitudeMap f;
    f.entries.emplace(BasisState::ground(5), cplx{r, 0.0});
    f.entries.emplace(plan.target_state, cplx{0.0, r * 0.999});
    f.entries.emplace(BasisState::from_bit_string("01000"),
                      cplx{std::sqrt(0.5 * (1 - 0.999 * 0.999)), 0.0});
    const auto out = evaluate_outcome(f, plan);
    CHECK(out.error_probability ==
          doctest::Approx(0.5 * (1 - 0.999 * 0.999)).epsilon(1e-10));
  }
}

TEST_CASE("plan serialization") {
  SpinSystem sys(4, 100.0);
  const auto plan = generate_protocol(sys, 0.25);
  const auto table = plan_table(plan);
  CHECK(table.find("|1001>") != std::string::npos);
  const auto json = plan_json(plan);
  CHECK(json.find("\"target_state\": \"1001\"") != std::string::npos);
}
