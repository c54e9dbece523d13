#include "eemimo/power_model.hpp"

#include <cmath>
#include <string>

#include "eemimo/errors.hpp"

namespace eemimo {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

void HardwareProfile::validate() const {
  require(p_fixed_w >= 0.0, "p0 must be >= 0");
  require(p_synthesizer_w >= 0.0, "p_syn must be >= 0");
  require(p_coding_w >= 0.0, "p_cod must be >= 0");
  require(p_decoding_w >= 0.0, "p_dec must be >= 0");
  require(p_tx_chain_w >= 0.0, "p_tx must be >= 0");
  require(p_rx_chain_w >= 0.0, "p_rx must be >= 0");
  require(ops_per_joule > 0.0, "ops_per_joule must be > 0");
  require(symbol_time_s > 0.0 && std::isfinite(symbol_time_s), "symbol_time must be > 0");
  require(coherence_bandwidth_hz > 0.0, "coherence_bandwidth must be > 0");
  require(coherence_time_s > 0.0, "coherence_time must be > 0");
  require(amplifier_efficiency > 0.0 && amplifier_efficiency <= 1.0, "eta must be in (0,1]");
  require(coherence_time_s * coherence_bandwidth_hz >= 1.0,
          "coherence_time * coherence_bandwidth must be >= 1");
}

int coherence_block_length(const HardwareProfile& profile) {
  profile.validate();
  const double uses = std::round(profile.coherence_time_s * profile.coherence_bandwidth_hz);
  if (uses < 2.0) {
    throw ValidationError("coherence block must hold at least 2 channel uses (got " +
                          std::to_string(static_cast<long long>(uses)) + ")");
  }
  if (uses > 1e9) throw ValidationError("coherence block longer than 1e9 channel uses");
  return static_cast<int>(uses);
}

void PowerCoefficients::validate() const {
  bool any_positive = false;
  for (double c : static_terms) {
    require(c >= 0.0, "power coefficients must be >= 0");
    any_positive = any_positive || c > 0.0;
  }
  for (double c : per_antenna_terms) {
    require(c >= 0.0, "power coefficients must be >= 0");
    any_positive = any_positive || c > 0.0;
  }
  require(any_positive, "at least one power coefficient must be > 0");
  require(amplifier_efficiency > 0.0 && amplifier_efficiency <= 1.0, "eta must be in (0,1]");
  require(coherence_block >= 2, "coherence block must hold at least 2 channel uses");
}

double PowerCoefficients::static_sum(double users) const {
  const double k = users;
  return static_terms[0] + k * (static_terms[1] + k * (static_terms[2] + k * static_terms[3]));
}

double PowerCoefficients::per_antenna_sum(double users) const {
  const double k = users;
  return per_antenna_terms[0] + k * (per_antenna_terms[1] + k * per_antenna_terms[2]);
}

double PowerCoefficients::circuit(double antennas, double users) const {
  return static_sum(users) + per_antenna_sum(users) * antennas;
}

PowerCoefficients coefficients_from_hardware(const HardwareProfile& profile) {
  return coefficients_from_hardware(profile, coherence_block_length(profile));
}

PowerCoefficients coefficients_from_hardware(const HardwareProfile& profile, int coherence_block) {
  profile.validate();
  if (coherence_block < 2) throw ValidationError("coherence block must hold at least 2 channel uses");
  const double s = profile.symbol_time_s;
  const double lt = profile.ops_per_joule * coherence_block;
  const double t = coherence_block;

  PowerCoefficients c;
  c.static_terms = {(profile.p_fixed_w + profile.p_synthesizer_w) * s,
                    (profile.p_coding_w + profile.p_decoding_w + profile.p_rx_chain_w) * s, 0.0,
                    2.0 / (3.0 * lt)};
  c.per_antenna_terms = {profile.p_tx_chain_w * s, (3.0 + t) / lt, 2.0 / lt};
  c.amplifier_efficiency = profile.amplifier_efficiency;
  c.coherence_block = coherence_block;
  return c;
}

double total_power(const PowerCoefficients& coeffs, int antennas, int users, double tx_energy) {
  if (users < 0) throw ValidationError("number of users must be >= 0");
  if (antennas < users) throw ValidationError("dimension error: M must be >= K");
  if (!(tx_energy >= 0.0)) throw ValidationError("transmit energy must be >= 0");
  return tx_energy / coeffs.amplifier_efficiency + coeffs.circuit(antennas, users);
}

}  // namespace eemimo
