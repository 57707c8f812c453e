#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinchain/perturb.hpp"
#include "spinchain/protocol.hpp"

namespace spinchain {

enum class Engine { exact, twolevel, estimator, improved };

Engine engine_from_string(const std::string& name);
std::string engine_name(Engine e);

/// Full-protocol error probability of one (L, δω, Ω) point with the
/// chosen engine.  `twolevel` keeps only the near-resonant ε terms
/// (the large-δω limit of the estimator); `estimator` is the full
/// product formula; `exact` and `improved` run the pulse sequence.
double protocol_error(const SpinSystem& sys, double omega_rabi, Engine engine,
                      const ImprovedOptions& opts = {});

struct Grid {
  double min = 0.0, max = 0.0, step = 0.0;

  std::vector<double> points() const;
};

struct SweepSpec {
  int length = 10;
  Engine engine = Engine::estimator;
  Grid omega_grid;
  Grid delta_omega_grid;
  double threshold = 1e-5;  // P0
  std::optional<int> k_2pik;
  std::string out_path;
  int workers = 0;  // 0: hardware concurrency
};

struct RegionRow {
  double delta_omega = 0.0, omega = 0.0, p = 0.0;
  bool below_threshold = false;
  std::string error;  // nonempty when the point failed (capacity etc.)
};

/// P over the (δω, Ω) grid; per-point failures are recorded, not fatal.
std::vector<RegionRow> region_diagram(const SweepSpec& spec);

struct ScalingRow {
  int length = 0;
  double delta_omega_min = 0.0;
  std::string error;
};

/// δω_min(L) with Ω = Ω^(k)(2J), by bisection of the estimator P against
/// the threshold; relative tolerance 1e-3.
std::vector<ScalingRow> scaling_curve(const std::vector<int>& lengths,
                                      int k_2pik, double threshold);

/// Largest L whose δω_min is <= delta_omega_budget (criterion for the
/// scaling-curve reproduction).
int max_feasible_length(int k_2pik, double threshold,
                        double delta_omega_budget);

struct ComparePoint {
  double delta_omega = 0.0, omega = 0.0;
};

struct CompareRow {
  ComparePoint point;
  double p_exact = 0.0, p_estimator = 0.0, p_improved = 0.0;
  std::string error;
};

std::vector<CompareRow> compare_engines(int length,
                                        const std::vector<ComparePoint>& path,
                                        const ImprovedOptions& opts = {});

/// Bisects Ω downward from Ω^(k)(2J) to the nearest crossing of
/// P(Ω) = threshold for the given engine (the lower region boundary of
/// the diagrams).  Returns nullopt when no bracket is found.
std::optional<double> find_boundary_omega(const SpinSystem& sys, int k_2pik,
                                          double threshold, Engine engine,
                                          const ImprovedOptions& opts = {});

void write_region_csv(const std::vector<RegionRow>& rows,
                      const std::string& path);
void write_scaling_csv(const std::vector<ScalingRow>& rows,
                       const std::string& path);
void write_compare_csv(const std::vector<CompareRow>& rows,
                       const std::string& path);

}  // namespace spinchain
