// Batch front-end for the spin-chain simulator: single runs, (Ω, δω)
// region sweeps, δω_min(L) scaling curves, and engine comparisons.
// All numeric output is CSV/JSON with 12 significant digits.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinchain/exact.hpp"
#include "spinchain/perturb.hpp"
#include "spinchain/protocol.hpp"
#include "spinchain/sweep.hpp"

using namespace spinchain;

namespace {

Grid parse_grid(const std::string& text) {
  // "min:max:step" or a single value.
  Grid g;
  const auto a = text.find(':');
  if (a == std::string::npos) {
    g.min = g.max = std::stod(text);
    g.step = 1.0;
    return g;
  }
  const auto b = text.find(':', a + 1);
  if (b == std::string::npos)
    throw CLI::ValidationError("grid", "expected min:max:step");
  g.min = std::stod(text.substr(0, a));
  g.max = std::stod(text.substr(a + 1, b - a - 1));
  g.step = std::stod(text.substr(b + 1));
  return g;
}

double resolve_omega(double omega, int k_2pik) {
  if (k_2pik > 0) return rabi_2pik(2.0, k_2pik);  // Δ = 2J, J = 1
  if (omega <= 0.0)
    throw CLI::ValidationError("omega", "need --omega > 0 or --k");
  return omega;
}

std::vector<ComparePoint> read_path_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<ComparePoint> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(line[0])) continue;
    ComparePoint p;
    if (std::sscanf(line.c_str(), "%lf,%lf", &p.delta_omega, &p.omega) == 2)
      pts.push_back(p);
  }
  return pts;
}

}  // namespace

int main(int argc, char** argv) {
  // Grid points run in our own worker pool; keep BLAS single-threaded.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  CLI::App app{"Ising spin-chain quantum computer: pulse-protocol "
               "simulation and error estimation"};
  app.set_config("--config", "", "key = value configuration file");
  app.require_subcommand(1);

  int L = 10;
  double omega = 0.0, delta_omega = 100.0, threshold = 1e-5;
  int k_2pik = 0, workers = 0;
  std::string engine_str = "estimator", out_path, omega_grid_str,
      delta_grid_str, path_csv, boundary_engine;
  double truncation_floor = 1e-14;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--L", L, "chain length");
    cmd->add_option("--k", k_2pik, "2pi-k index fixing omega = |2J|/sqrt(4k^2-1)");
    cmd->add_option("--threshold", threshold, "error threshold P0");
    cmd->add_option("--out", out_path, "output file");
  };

  auto* sim = app.add_subcommand("simulate", "run one protocol instance");
  add_common(sim);
  sim->add_option("--engine", engine_str, "exact|twolevel|estimator|improved");
  sim->add_option("--omega", omega, "Rabi frequency");
  sim->add_option("--delta-omega", delta_omega, "Larmor spacing");
  sim->add_option("--truncation-floor", truncation_floor,
                  "improved-engine probability floor");

  auto* region = app.add_subcommand("region", "P over a (delta-omega, omega) grid");
  add_common(region);
  region->add_option("--engine", engine_str, "exact|twolevel|estimator|improved");
  region->add_option("--omega", omega_grid_str, "omega grid min:max:step")
      ->required();
  region->add_option("--delta-omega", delta_grid_str,
                     "delta-omega grid min:max:step")
      ->required();
  region->add_option("--workers", workers, "worker threads (0 = auto)");

  auto* scaling = app.add_subcommand(
      "scaling", "delta-omega_min(L) at omega = omega^(k)");
  add_common(scaling);
  std::string l_list_str = "10:1000:30";
  scaling->add_option("--L-list", l_list_str, "L grid min:max:step");

  auto* compare = app.add_subcommand(
      "compare", "exact vs estimator vs improved along a parameter path");
  add_common(compare);
  compare->add_option("--path", path_csv,
                      "CSV of delta_omega,omega points");
  compare->add_option("--boundary", boundary_engine,
                      "derive the path from the P=P0 boundary of this engine "
                      "(needs --delta-omega grid and --k)");
  compare->add_option("--delta-omega", delta_grid_str,
                      "delta-omega grid for --boundary");

  auto* dump = app.add_subcommand("protocol-dump", "emit the pulse table");
  add_common(dump);
  dump->add_option("--omega", omega, "Rabi frequency");
  dump->add_option("--delta-omega", delta_omega, "Larmor spacing");
  dump->add_flag("--json", "emit JSON instead of the table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      SpinSystem sys(L, delta_omega);
      const double w = resolve_omega(omega, k_2pik);
      const Engine engine = engine_from_string(engine_str);
      ImprovedOptions opts;
      opts.truncation_floor = truncation_floor;
      const ProtocolPlan plan = generate_protocol(sys, w);

      if (engine == Engine::estimator || engine == Engine::twolevel) {
        ErrorBudget b = error_budget_for_plan(sys, plan);
        if (engine == Engine::twolevel)
          for (auto& e : b.per_pulse) e.mu = 0.0;
        b.total_p = total_error(b.per_pulse);
        std::cout << b.json() << "\n";
      } else {
        AmplitudeMap final_state;
        if (engine == Engine::exact) {
          const auto pulses = plan.pulses();
          final_state = run_protocol_exact(sys, pulses,
                                           AmplitudeMap::ground(L))
                            .final_state;
        } else {
          final_state = run_protocol_improved(sys, plan, opts).final_state;
        }
        const auto out = evaluate_outcome(final_state, plan);
        std::printf("{\"engine\": \"%s\", \"P\": %.12g, \"phi1\": %.12g, "
                    "\"phi2\": %.12g}\n",
                    engine_name(engine).c_str(), out.error_probability,
                    out.phi1, out.phi2);
        if (!out_path.empty()) dump_amplitudes_csv(final_state, out_path);
      }
    } else if (region->parsed()) {
      SweepSpec spec;
      spec.length = L;
      spec.engine = engine_from_string(engine_str);
      spec.omega_grid = k_2pik > 0
                            ? Grid{rabi_2pik(2.0, k_2pik),
                                   rabi_2pik(2.0, k_2pik), 1.0}
                            : parse_grid(omega_grid_str);
      spec.delta_omega_grid = parse_grid(delta_grid_str);
      spec.threshold = threshold;
      spec.workers = workers;
      const auto rows = region_diagram(spec);
      write_region_csv(rows, out_path.empty() ? "region.csv" : out_path);
    } else if (scaling->parsed()) {
      if (k_2pik < 1) throw std::runtime_error("scaling: needs --k >= 1");
      const Grid lg = parse_grid(l_list_str);
      std::vector<int> lengths;
      for (double x : lg.points()) lengths.push_back(static_cast<int>(x));
      const auto rows = scaling_curve(lengths, k_2pik, threshold);
      write_scaling_csv(rows, out_path.empty() ? "scaling.csv" : out_path);
    } else if (compare->parsed()) {
      std::vector<ComparePoint> pts;
      if (!path_csv.empty()) {
        pts = read_path_csv(path_csv);
      } else if (!boundary_engine.empty()) {
        if (k_2pik < 1) throw std::runtime_error("compare: needs --k >= 1");
        const Engine be = engine_from_string(boundary_engine);
        for (double d : parse_grid(delta_grid_str).points()) {
          SpinSystem sys(L, d);
          if (auto w = find_boundary_omega(sys, k_2pik, threshold, be))
            pts.push_back({d, *w});
        }
      } else {
        throw std::runtime_error("compare: needs --path or --boundary");
      }
      const auto rows = compare_engines(L, pts);
      write_compare_csv(rows, out_path.empty() ? "compare.csv" : out_path);
    } else if (dump->parsed()) {
      SpinSystem sys(L, delta_omega);
      const ProtocolPlan plan =
          generate_protocol(sys, resolve_omega(omega, k_2pik));
      const std::string text =
          dump->count("--json") ? plan_json(plan) : plan_table(plan);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out_path);
        f << text;
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\": \"%s\"}\n", e.what());
    return 1;
  }
  return 0;
}
