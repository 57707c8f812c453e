#include "spinchain/perturb.hpp"

#include <cmath>
#include <complex>

#include <nlohmann/json.hpp>

namespace spinchain {

double nonresonant_probability(int k_res, int k_other, double omega_rabi,
                               double delta_omega) {
  if (k_res == k_other)
    throw std::invalid_argument("nonresonant_probability: k_res == k_other");
  const double d = (k_res - k_other) * delta_omega;
  const double r = 0.5 * omega_rabi / d;
  return r * r;
}

double mu_for_pulse(const SpinSystem& sys, int k_res, double omega_rabi) {
  if (k_res < 0 || k_res >= sys.length)
    throw std::out_of_range("mu_for_pulse: k_res out of range");
  const double mu = std::pow(0.5 * omega_rabi / sys.delta_omega, 2);
  double sum = 0.0;
  for (int k = 0; k < sys.length; ++k) {
    if (k == k_res) continue;
    const double d = k_res - k;
    sum += 1.0 / (d * d);
  }
  return mu * sum;
}

double total_error(std::span<const PulseError> per_pulse) {
  double prod_mu = 1.0, prod_both = 1.0;
  for (const auto& e : per_pulse) {
    if (e.epsilon < 0.0 || e.mu < 0.0 || e.epsilon + e.mu > 1.0)
      throw std::invalid_argument("total_error: bad per-pulse probability");
    prod_mu *= 1.0 - e.mu;
    prod_both *= 1.0 - e.mu - e.epsilon;
  }
  return 1.0 - 0.5 * prod_mu - 0.5 * prod_both;
}

std::string ErrorBudget::json() const {
  nlohmann::json j;
  j["mu_unit"] = mu_unit;
  j["total_p"] = total_p;
  auto& rows = j["per_pulse"] = nlohmann::json::array();
  for (const auto& e : per_pulse)
    rows.push_back({{"epsilon", e.epsilon}, {"mu", e.mu}});
  return j.dump(2);
}

ErrorBudget error_budget_for_plan(const SpinSystem& sys,
                                  const ProtocolPlan& plan) {
  ErrorBudget b;
  b.mu_unit = std::pow(0.5 * plan.omega_rabi / sys.delta_omega, 2);
  b.per_pulse.reserve(plan.steps.size());
  for (std::size_t n = 0; n < plan.steps.size(); ++n) {
    const auto& s = plan.steps[n];
    PulseError e;
    // ε_1 = 0: the first pulse's ground-branch transition is the intended one.
    e.epsilon = (n == 0) ? 0.0
                         : epsilon(s.pulse.omega_rabi, s.bystander_delta,
                                   s.pulse.tau);
    e.mu = mu_for_pulse(sys, s.resonant_spin, s.pulse.omega_rabi);
    b.per_pulse.push_back(e);
  }
  b.total_p = total_error(b.per_pulse);
  return b;
}

// ---------------------------------------------------------------------------
// Improved perturbation theory.
// ---------------------------------------------------------------------------

int resonant_spin_for(const SpinSystem& sys, double nu) {
  const double k = std::round((nu - sys.omega0) / sys.delta_omega);
  return static_cast<int>(std::clamp(k, 0.0, sys.length - 1.0));
}

namespace {

// Two-component eigenvector over (m, p).
struct Vec2 {
  double m, p;
};

// Both expanded eigenstates of one block, built in a single pass, plus
// the per-neighbor data the sparse propagator needs for the cross terms.
struct BlockExpansion {
  double e_q = 0.0, e_Q = 0.0;  // second-order energies, rel. ground
  Vec2 anchor_q{}, anchor_Q{};  // renormalized anchor components
  struct Neighbor {
    BasisState m2, p2;
    double e_m2, delta2;  // rot-frame energies e(m2) and e(p2) - e(m2)
    Vec2 psi_q, psi_Q;    // bare eigenvectors of the neighbor block
    double f_q, f_Q;      // their energies, rel. ground
    Vec2 bare_q, bare_Q;  // renormalized admixture coefs on (m2, p2)
    double c_qq, c_Qq, c_qQ, c_QQ;  // c_ij = w_ij/(E_i - F_j), unrenorm.
  };
  std::vector<Neighbor> neighbors;  // L-1 one-flip neighbor blocks
};

BlockExpansion expand_block(const SpinSystem& sys, const BasisState& m_state,
                            int k_res, double nu, double omega_rabi,
                            double degeneracy_floor_rel) {
  const double v = -0.5 * omega_rabi;
  const double e_m = effective_energy_rel_ground(sys, m_state, nu);
  const double delta = flip_energy_delta(sys, m_state, k_res) - nu;
  const auto eig = block_eigensystem(
      TwoLevelBlock::make(e_m, delta, omega_rabi));
  const Vec2 aq{eig.lower_m, eig.lower_p};
  const Vec2 aQ{eig.upper_m, eig.upper_p};
  const double deg_floor = degeneracy_floor_rel * sys.delta_omega;

  BlockExpansion x;
  x.neighbors.reserve(sys.length - 1);
  double sum2_q = 0.0, sum2_Q = 0.0;
  double norm2_q = 1.0, norm2_Q = 1.0;

  for (int kp = 0; kp < sys.length; ++kp) {
    if (kp == k_res) continue;
    const BasisState m2 = m_state.with_flip(kp);
    const double e_m2 = effective_energy_rel_ground(sys, m2, nu);
    const double delta2 = flip_energy_delta(sys, m2, k_res) - nu;
    const auto eig2 = block_eigensystem(
        TwoLevelBlock::make(e_m2, delta2, omega_rabi));

    BlockExpansion::Neighbor n;
    n.m2 = m2;
    n.p2 = m2.with_flip(k_res);
    n.e_m2 = e_m2;
    n.delta2 = delta2;
    n.psi_q = {eig2.lower_m, eig2.lower_p};
    n.psi_Q = {eig2.upper_m, eig2.upper_p};
    n.f_q = eig2.e_lower;
    n.f_Q = eig2.e_upper;

    const Vec2 nb[2] = {n.psi_q, n.psi_Q};
    const double nb_e[2] = {n.f_q, n.f_Q};
    double c[2][2];  // [i in {q,Q}][j in {q2,Q2}]
    double cq_m = 0.0, cq_p = 0.0, cQ_m = 0.0, cQ_p = 0.0;
    for (int w = 0; w < 2; ++w) {
      const double v_q = v * (aq.m * nb[w].m + aq.p * nb[w].p);
      const double v_Q = v * (aQ.m * nb[w].m + aQ.p * nb[w].p);
      const double den_q = eig.e_lower - nb_e[w];
      const double den_Q = eig.e_upper - nb_e[w];
      if (std::abs(den_q) < deg_floor || std::abs(den_Q) < deg_floor)
        throw DegeneracyError("improved PT: near-degenerate blocks");
      c[0][w] = v_q / den_q;
      c[1][w] = v_Q / den_Q;
      cq_m += c[0][w] * nb[w].m;
      cq_p += c[0][w] * nb[w].p;
      cQ_m += c[1][w] * nb[w].m;
      cQ_p += c[1][w] * nb[w].p;
      sum2_q += v_q * v_q / den_q;
      sum2_Q += v_Q * v_Q / den_Q;
    }
    n.c_qq = c[0][0];
    n.c_qQ = c[0][1];
    n.c_Qq = c[1][0];
    n.c_QQ = c[1][1];
    n.bare_q = {cq_m, cq_p};
    n.bare_Q = {cQ_m, cQ_p};
    norm2_q += cq_m * cq_m + cq_p * cq_p;
    norm2_Q += cQ_m * cQ_m + cQ_p * cQ_p;
    x.neighbors.push_back(n);
  }

  x.e_q = eig.e_lower + sum2_q;
  x.e_Q = eig.e_upper + sum2_Q;
  const double inv_q = 1.0 / std::sqrt(norm2_q);
  const double inv_Q = 1.0 / std::sqrt(norm2_Q);
  x.anchor_q = {aq.m * inv_q, aq.p * inv_q};
  x.anchor_Q = {aQ.m * inv_Q, aQ.p * inv_Q};
  for (auto& n : x.neighbors) {
    n.bare_q = {n.bare_q.m * inv_q, n.bare_q.p * inv_q};
    n.bare_Q = {n.bare_Q.m * inv_Q, n.bare_Q.p * inv_Q};
  }
  return x;
}

}  // namespace

ExpandedEigenstate expanded_eigenstate(const SpinSystem& sys,
                                       const Pulse& pulse,
                                       const BasisState& m_state, int k_res,
                                       BlockMember which,
                                       double degeneracy_floor_rel) {
  m_state.check_index(k_res);
  if (m_state.is_flipped(k_res))
    throw std::invalid_argument(
        "expanded_eigenstate: m_state must have the resonant spin in |0>");
  const BlockExpansion x = expand_block(sys, m_state, k_res, pulse.nu,
                                        pulse.omega_rabi,
                                        degeneracy_floor_rel);
  ExpandedEigenstate out;
  out.anchor = which;
  const bool lower = which == BlockMember::m;
  out.energy2 = lower ? x.e_q : x.e_Q;
  const Vec2 a = lower ? x.anchor_q : x.anchor_Q;
  out.coefficients.reserve(2 + 2 * x.neighbors.size());
  out.coefficients.emplace_back(m_state, a.m);
  out.coefficients.emplace_back(m_state.with_flip(k_res), a.p);
  for (const auto& n : x.neighbors) {
    const Vec2 bare = lower ? n.bare_q : n.bare_Q;
    out.coefficients.emplace_back(n.m2, bare.m);
    out.coefficients.emplace_back(n.p2, bare.p);
  }
  return out;
}

namespace {

void add_amplitude(AmplitudeMap::Map& out, const BasisState& s,
                   std::complex<double> amp, double floor,
                   double& pruned_mass) {
  auto it = out.find(s);
  if (it != out.end()) {
    it->second += amp;
    return;
  }
  const double p = std::norm(amp);
  if (p >= floor)
    out.emplace(s, amp);
  else
    pruned_mass += p;
}

}  // namespace

AmplitudeMap improved_propagate(const AmplitudeMap& state,
                                const SpinSystem& sys, const Pulse& pulse,
                                double t0, const ImprovedOptions& opts,
                                ImprovedStats* stats) {
  if (state.frame != Frame::lab)
    throw std::invalid_argument("improved_propagate: expected lab frame");
  if (pulse.tau == 0.0) return state;
  const int k = resonant_spin_for(sys, pulse.nu);
  const double omega = pulse.omega_rabi;
  const double tau = pulse.tau;
  const double nu = pulse.nu;
  const double floor = opts.truncation_floor;
  const double mu =
      std::pow(0.5 * omega / sys.delta_omega, 2);
  const double heavy_thresh = floor / (opts.heavy_safety * mu);
  const std::complex<double> i1{0.0, 1.0};
  const double t1 = t0 + tau;

  double pruned = 0.0;
  AmplitudeMap out;
  out.frame = Frame::lab;
  out.entries.reserve(state.entries.size() * 2 + 16);

  for (const auto& [s, amp] : state.entries) {
    const bool s_is_p = s.is_flipped(k);
    const BasisState partner = s.with_flip(k);
    if (s_is_p && state.entries.contains(partner))
      continue;  // block handled at its m-side member
    const BasisState& m_state = s_is_p ? partner : s;
    const BasisState& p_state = s_is_p ? s : partner;
    const std::complex<double> a_m = s_is_p ? state.amplitude(partner) : amp;
    const std::complex<double> a_p = s_is_p ? amp : state.amplitude(partner);
    const double w = std::max(std::norm(a_m), std::norm(a_p));
    const double delta = flip_energy_delta(sys, m_state, k) - nu;

    if (w < heavy_thresh) {
      // Leakage out of this block cannot survive truncation: the exact
      // analytic 2x2 propagator is all that is needed.
      const auto [b_m, b_p] = propagate_block_amplitudes(
          TwoLevelBlock::make(0.0, delta, omega), a_m, a_p, t0, tau);
      add_amplitude(out.entries, m_state, b_m, floor, pruned);
      add_amplitude(out.entries, p_state, b_p, floor, pruned);
      continue;
    }

    const BlockExpansion x = expand_block(sys, m_state, k, nu, omega,
                                          opts.degeneracy_floor_rel);
    const double e_m = effective_energy_rel_ground(sys, m_state, nu);
    const std::complex<double> rot_m = a_m * std::exp(-i1 * (e_m * t0));
    const std::complex<double> rot_p =
        a_p * std::exp(-i1 * ((e_m + delta) * t0));
    const std::complex<double> aq0 =
        x.anchor_q.m * rot_m + x.anchor_q.p * rot_p;
    const std::complex<double> aQ0 =
        x.anchor_Q.m * rot_m + x.anchor_Q.p * rot_p;

    // Project the full support onto both expanded eigenstates: the
    // admixture terms carry amplitude leaked by earlier pulses back into
    // the block, keeping the leakage coherent instead of adding per pulse.
    struct NbIn {
      std::complex<double> rot_nm, rot_np;
      bool heavy;
    };
    std::vector<NbIn> in(x.neighbors.size());
    std::complex<double> proj_q = aq0, proj_Q = aQ0;
    for (std::size_t t = 0; t < x.neighbors.size(); ++t) {
      const auto& nb = x.neighbors[t];
      const auto itm = state.entries.find(nb.m2);
      const auto itp = state.entries.find(nb.p2);
      const std::complex<double> am =
          itm == state.entries.end() ? std::complex<double>{} : itm->second;
      const std::complex<double> ap =
          itp == state.entries.end() ? std::complex<double>{} : itp->second;
      in[t].rot_nm = am * std::exp(-i1 * (nb.e_m2 * t0));
      in[t].rot_np = ap * std::exp(-i1 * ((nb.e_m2 + nb.delta2) * t0));
      in[t].heavy = std::max(std::norm(am), std::norm(ap)) >= heavy_thresh;
      proj_q += nb.bare_q.m * in[t].rot_nm + nb.bare_q.p * in[t].rot_np;
      proj_Q += nb.bare_Q.m * in[t].rot_nm + nb.bare_Q.p * in[t].rot_np;
    }
    proj_q *= std::exp(-i1 * (x.e_q * tau));
    proj_Q *= std::exp(-i1 * (x.e_Q * tau));

    // Cross-block matrix elements are ~ c_ij (e^{-iE_i τ} - e^{-iF_j τ}).
    // This block's eigenstates supply the E-phase half; the F-phase half
    // normally comes from the neighbor's own expansion, so whenever the
    // neighbor is too light to be expanded itself, add its half here.
    std::complex<double> rev_q{}, rev_Q{};  // reverse flow onto this block
    for (std::size_t t = 0; t < x.neighbors.size(); ++t) {
      const auto& nb = x.neighbors[t];
      std::complex<double> out_m = proj_q * nb.bare_q.m + proj_Q * nb.bare_Q.m;
      std::complex<double> out_p = proj_q * nb.bare_q.p + proj_Q * nb.bare_Q.p;
      if (!in[t].heavy) {
        const std::complex<double> ph_q = std::exp(-i1 * (nb.f_q * tau));
        const std::complex<double> ph_Q = std::exp(-i1 * (nb.f_Q * tau));
        const std::complex<double> em_q =
            ph_q * (nb.c_qq * aq0 + nb.c_Qq * aQ0);
        const std::complex<double> em_Q =
            ph_Q * (nb.c_qQ * aq0 + nb.c_QQ * aQ0);
        out_m -= em_q * nb.psi_q.m + em_Q * nb.psi_Q.m;
        out_p -= em_q * nb.psi_q.p + em_Q * nb.psi_Q.p;
        const std::complex<double> bk_q =
            ph_q * (nb.psi_q.m * in[t].rot_nm + nb.psi_q.p * in[t].rot_np);
        const std::complex<double> bk_Q =
            ph_Q * (nb.psi_Q.m * in[t].rot_nm + nb.psi_Q.p * in[t].rot_np);
        rev_q += nb.c_qq * bk_q + nb.c_qQ * bk_Q;
        rev_Q += nb.c_Qq * bk_q + nb.c_QQ * bk_Q;
      }
      add_amplitude(out.entries, nb.m2,
                    out_m * std::exp(i1 * (nb.e_m2 * t1)), floor, pruned);
      add_amplitude(out.entries, nb.p2,
                    out_p * std::exp(i1 * ((nb.e_m2 + nb.delta2) * t1)),
                    floor, pruned);
    }

    add_amplitude(out.entries, m_state,
                  (proj_q * x.anchor_q.m + proj_Q * x.anchor_Q.m -
                   rev_q * x.anchor_q.m - rev_Q * x.anchor_Q.m) *
                      std::exp(i1 * (e_m * t1)),
                  floor, pruned);
    add_amplitude(out.entries, p_state,
                  (proj_q * x.anchor_q.p + proj_Q * x.anchor_Q.p -
                   rev_q * x.anchor_q.p - rev_Q * x.anchor_Q.p) *
                      std::exp(i1 * ((e_m + delta) * t1)),
                  floor, pruned);
  }

  if (out.entries.size() > opts.support_cap)
    throw CapacityError("improved_propagate: support exceeds cap");
  if (stats) {
    stats->pruned_mass += pruned;
    stats->max_support = std::max(stats->max_support, out.entries.size());
  }
  return out;
}

ImprovedRunResult run_protocol_improved(const SpinSystem& sys,
                                        const ProtocolPlan& plan,
                                        const ImprovedOptions& opts) {
  ImprovedRunResult r;
  r.final_state = AmplitudeMap::ground(sys.length);
  double t = 0.0;
  for (const auto& s : plan.steps) {
    r.final_state =
        improved_propagate(r.final_state, sys, s.pulse, t, opts, &r.stats);
    t += s.pulse.tau;
  }
  return r;
}

}  // namespace spinchain
