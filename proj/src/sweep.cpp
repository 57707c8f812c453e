#include "spinchain/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "spinchain/exact.hpp"

namespace spinchain {

Engine engine_from_string(const std::string& name) {
  if (name == "exact") return Engine::exact;
  if (name == "twolevel") return Engine::twolevel;
  if (name == "estimator") return Engine::estimator;
  if (name == "improved") return Engine::improved;
  throw std::invalid_argument("unknown engine: " + name);
}

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::exact: return "exact";
    case Engine::twolevel: return "twolevel";
    case Engine::estimator: return "estimator";
    case Engine::improved: return "improved";
  }
  return "?";
}

double protocol_error(const SpinSystem& sys, double omega_rabi, Engine engine,
                      const ImprovedOptions& opts) {
  const ProtocolPlan plan = generate_protocol(sys, omega_rabi);
  switch (engine) {
    case Engine::estimator:
      return error_budget_for_plan(sys, plan).total_p;
    case Engine::twolevel: {
      // Near-resonant transitions only: the mu_n = 0 limit of the
      // product formula.
      ErrorBudget b = error_budget_for_plan(sys, plan);
      for (auto& e : b.per_pulse) e.mu = 0.0;
      return total_error(b.per_pulse);
    }
    case Engine::exact: {
      const auto pulses = plan.pulses();
      const auto run = run_protocol_exact(
          sys, pulses, AmplitudeMap::ground(sys.length));
      return evaluate_outcome(run.final_state, plan).error_probability;
    }
    case Engine::improved: {
      const auto run = run_protocol_improved(sys, plan, opts);
      return evaluate_outcome(run.final_state, plan).error_probability;
    }
  }
  throw std::logic_error("protocol_error: unreachable");
}

std::vector<double> Grid::points() const {
  if (max == min) return {min};
  if (!(max >= min) || step <= 0.0)
    throw std::invalid_argument("Grid: need max >= min and step > 0");
  std::vector<double> pts;
  for (int i = 0;; ++i) {
    const double x = min + i * step;
    if (x > max * (1.0 + 1e-12)) break;
    pts.push_back(x);
  }
  return pts;
}

namespace {

// Deterministic worker pool: results are indexed by grid position, so
// parallel and serial runs produce identical files.
template <typename F>
void parallel_for(std::size_t count, int workers, F&& body) {
  int n = workers > 0
              ? workers
              : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<int>(std::min<std::size_t>(n, count));
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (int t = 0; t < n; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count;
           i = next.fetch_add(1))
        body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<RegionRow> region_diagram(const SweepSpec& spec) {
  if (spec.engine == Engine::exact && spec.length > kExactEngineLimit)
    throw CapacityError("region_diagram: exact engine rejected for L > 14");
  const auto d_pts = spec.delta_omega_grid.points();
  const auto o_pts = spec.omega_grid.points();
  if (d_pts.empty() || o_pts.empty())
    throw std::invalid_argument("region_diagram: empty grid");

  std::vector<RegionRow> rows(d_pts.size() * o_pts.size());
  parallel_for(rows.size(), spec.workers, [&](std::size_t i) {
    RegionRow& r = rows[i];
    r.delta_omega = d_pts[i / o_pts.size()];
    const double omega = o_pts[i % o_pts.size()];
    r.omega = omega;
    try {
      SpinSystem sys(spec.length, r.delta_omega);
      r.p = protocol_error(sys, omega, spec.engine);
      r.below_threshold = r.p < spec.threshold;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  return rows;
}

namespace {

double estimator_p(int length, double delta_omega, double omega_rabi) {
  SpinSystem sys(length, delta_omega);
  return protocol_error(sys, omega_rabi, Engine::estimator);
}

}  // namespace

std::vector<ScalingRow> scaling_curve(const std::vector<int>& lengths,
                                      int k_2pik, double threshold) {
  if (k_2pik < 1) throw std::invalid_argument("scaling_curve: k must be >= 1");
  const double omega = rabi_2pik(2.0, k_2pik);
  std::vector<ScalingRow> rows;
  rows.reserve(lengths.size());
  for (int L : lengths) {
    ScalingRow row;
    row.length = L;
    try {
      double lo = 2.0, hi = 1e6;
      // P is decreasing in δω; expand the bracket if needed.
      while (estimator_p(L, hi, omega) > threshold && hi < 1e12) hi *= 10.0;
      if (estimator_p(L, hi, omega) > threshold)
        throw std::runtime_error("no delta_omega below 1e12 reaches threshold");
      if (estimator_p(L, lo, omega) <= threshold) {
        row.delta_omega_min = lo;
      } else {
        while (hi / lo - 1.0 > 1e-3) {
          const double mid = std::sqrt(lo * hi);
          (estimator_p(L, mid, omega) <= threshold ? hi : lo) = mid;
        }
        row.delta_omega_min = hi;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

int max_feasible_length(int k_2pik, double threshold,
                        double delta_omega_budget) {
  const double omega = rabi_2pik(2.0, k_2pik);
  auto feasible = [&](int L) {
    return estimator_p(L, delta_omega_budget, omega) <= threshold;
  };
  if (!feasible(3)) return 0;
  int lo = 3, hi = 3;
  while (feasible(hi) && hi < (1 << 20)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<CompareRow> compare_engines(int length,
                                        const std::vector<ComparePoint>& path,
                                        const ImprovedOptions& opts) {
  if (length > kExactEngineLimit)
    throw CapacityError("compare_engines: L exceeds the exact-engine limit");
  std::vector<CompareRow> rows;
  rows.reserve(path.size());
  for (const auto& pt : path) {
    CompareRow r;
    r.point = pt;
    try {
      SpinSystem sys(length, pt.delta_omega);
      r.p_estimator = protocol_error(sys, pt.omega, Engine::estimator);
      r.p_improved = protocol_error(sys, pt.omega, Engine::improved, opts);
      r.p_exact = protocol_error(sys, pt.omega, Engine::exact);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    rows.push_back(r);
  }
  return rows;
}

std::optional<double> find_boundary_omega(const SpinSystem& sys, int k_2pik,
                                          double threshold, Engine engine,
                                          const ImprovedOptions& opts) {
  const double omega_center = rabi_2pik(2.0 * sys.ising_j, k_2pik);
  auto p_of = [&](double omega) {
    return protocol_error(sys, omega, engine, opts);
  };
  if (p_of(omega_center) >= threshold) return std::nullopt;
  // Walk down from the 2πk point until P crosses the threshold.
  double hi = omega_center, lo = 0.0;
  for (int j = 1; j <= 60; ++j) {
    const double omega = omega_center * (1.0 - 0.005 * j);
    if (omega <= 0.0) break;
    if (p_of(omega) > threshold) {
      lo = omega;
      break;
    }
    hi = omega;
  }
  if (lo == 0.0) return std::nullopt;
  for (int it = 0; it < 60 && hi - lo > 1e-12 * omega_center; ++it) {
    const double mid = 0.5 * (lo + hi);
    (p_of(mid) > threshold ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

std::FILE* open_out(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

}  // namespace

void write_region_csv(const std::vector<RegionRow>& rows,
                      const std::string& path) {
  std::FILE* f = open_out(path);
  std::fprintf(f, "delta_omega,omega,p,below_threshold,error\n");
  for (const auto& r : rows)
    std::fprintf(f, "%.12g,%.12g,%.12g,%d,%s\n", r.delta_omega, r.omega, r.p,
                 r.below_threshold ? 1 : 0, r.error.c_str());
  std::fclose(f);
}

void write_scaling_csv(const std::vector<ScalingRow>& rows,
                       const std::string& path) {
  std::FILE* f = open_out(path);
  std::fprintf(f, "L,delta_omega_min,error\n");
  for (const auto& r : rows)
    std::fprintf(f, "%d,%.12g,%s\n", r.length, r.delta_omega_min,
                 r.error.c_str());
  std::fclose(f);
}

void write_compare_csv(const std::vector<CompareRow>& rows,
                       const std::string& path) {
  std::FILE* f = open_out(path);
  std::fprintf(f, "delta_omega,omega,p_exact,p_estimator,p_improved,error\n");
  for (const auto& r : rows)
    std::fprintf(f, "%.12g,%.12g,%.12g,%.12g,%.12g,%s\n", r.point.delta_omega,
                 r.point.omega, r.p_exact, r.p_estimator, r.p_improved,
                 r.error.c_str());
  std::fclose(f);
}

}  // namespace spinchain
