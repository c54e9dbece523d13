#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eemimo/design_optimizer.hpp"
#include "eemimo/mc_link_sim.hpp"
#include "eemimo/power_model.hpp"
#include "eemimo/propagation.hpp"

namespace eemimo {

struct McSettings {
  mc::McConfig run;
  std::vector<mc::PrecoderSpec> schemes;  // default: zf, rzf, mrt, zf:mmse
  std::vector<int> antennas{20, 60, 100, 200, 300};
  double rho_log10_min = -4.0;
  double rho_log10_max = 6.0;
};

/// A fully validated scenario. Physical units are converted on load; the
/// derived quantities below are in J per channel use.
struct ScenarioConfig {
  HardwareProfile hardware;
  PropagationModel propagation;
  std::optional<int> coherence_block;  // overrides round(T_coh * B)

  std::optional<IntRange> antennas;  // unset: 1..1000
  std::optional<IntRange> users;     // unset: 1..min(T-1, 500)
  std::optional<double> rho_cap;

  DesignPoint alternating_init{3, 1, 1.0, 0.0};
  int max_iter = 50;

  McSettings mc;

  PowerCoefficients coefficients() const;
  double a_lambda() const;
  SearchSpace search_space() const;

  /// Re-checks every invariant. Throws ConfigError.
  void validate() const;
};

/// Built-in reference scenario (the HardwareProfile and PropagationModel defaults).
ScenarioConfig default_config();

/// Parses the INI-style format (see README). Relative pdf_csv paths are
/// resolved against the config file's directory. Throws ConfigError.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");

/// "zf", "rzf", "mrt", optionally with ":perfect" or ":mmse".
mc::PrecoderSpec parse_precoder(const std::string& token);
std::string precoder_name(const mc::PrecoderSpec& spec);

}  // namespace eemimo
