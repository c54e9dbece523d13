#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "eemimo/config.hpp"

namespace eemimo::cli {

struct Context {
  ScenarioConfig config;
  std::filesystem::path out_dir = ".";
  std::ostream* out = nullptr;  // human-readable summary
  std::ostream* err = nullptr;  // warnings
};

/// Exhaustive search and the alternating algorithm. Writes optimum.csv and
/// trajectory.csv.
void run_optimize(const Context& ctx);

/// EE over the (M, K) grid of the search space. ZF with perfect CSI is
/// analytic; any other scheme is Monte Carlo with the MC-optimal rho per
/// cell. Writes surface_<scheme>_<csi>.csv.
void run_surface(const Context& ctx, const mc::PrecoderSpec& scheme);

/// Best (K, rho) per M and scheme. ZF with perfect CSI is analytic.
struct SweepRow {
  mc::PrecoderSpec scheme;
  bool analytic = false;
  int antennas = 0;
  int users = 0;
  double rho = 0.0;
  double tx_energy = 0.0;  // J/c.u.
  double rate_per_ue = 0.0;
  double sum_rate = 0.0;
  double ee = 0.0;
};
std::vector<SweepRow> scheme_sweep(const Context& ctx);

/// Writes power_scaling.csv from scheme_sweep.
void run_power_scaling(const Context& ctx);

/// Writes ee_vs_antennas.csv from scheme_sweep.
void run_ee_vs_antennas(const Context& ctx);

struct SimulateRequest {
  int antennas = 0;
  int users = 0;
  std::optional<double> rho;  // unset: MC-optimal rho per scheme
};

/// Raw MC runs for every configured scheme. Writes simulate.csv.
void run_simulate(const Context& ctx, const SimulateRequest& request);

/// %.17g, the round-trip format of every CSV number.
std::string format_number(double value);

}  // namespace eemimo::cli
