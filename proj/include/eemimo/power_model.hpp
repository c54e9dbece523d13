#pragma once

#include <array>

namespace eemimo {

/// Physical description of the base station and terminals. Powers in W,
/// timing in s, bandwidth in Hz.
struct HardwareProfile {
  double p_fixed_w = 2.0;          // P0, architecture (control, backhaul, baseband)
  double p_synthesizer_w = 2.0;    // P_syn, shared local oscillator
  double p_coding_w = 4.0;         // P_cod
  double p_decoding_w = 0.5;       // P_dec
  double p_tx_chain_w = 1.0;       // P_tx, per BS antenna
  double p_rx_chain_w = 0.3;       // P_rx, per UE
  double ops_per_joule = 1e9;      // L
  double symbol_time_s = 1.0 / 9e6;  // S, converts W to J per channel use
  double coherence_bandwidth_hz = 180e3;
  double coherence_time_s = 0.032;
  double amplifier_efficiency = 0.3;  // eta

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;
};

/// Channel uses per coherence block, round(T_coh * B). Throws ValidationError
/// when the block has fewer than two channel uses.
int coherence_block_length(const HardwareProfile& profile);

/// Coefficients of the circuit power polynomial, all in J per channel use:
///   P_total = tx / eta + sum_i static_terms[i] K^i + sum_i per_antenna_terms[i] K^i M
struct PowerCoefficients {
  std::array<double, 4> static_terms{};       // C_{i,0}, i = 0..3
  std::array<double, 3> per_antenna_terms{};  // C_{i,1}, i = 0..2
  double amplifier_efficiency = 1.0;
  int coherence_block = 2;  // T

  void validate() const;

  /// sum_i C_{i,0} K^i
  double static_sum(double users) const;
  /// sum_i C_{i,1} K^i
  double per_antenna_sum(double users) const;
  /// Circuit part of the total power: static_sum(K) + per_antenna_sum(K) * M.
  double circuit(double antennas, double users) const;
};

/// ZF coefficient set for a hardware profile. T is taken from
/// coherence_block_length(profile).
PowerCoefficients coefficients_from_hardware(const HardwareProfile& profile);

/// Same, with an explicit coherence block length overriding T_coh * B.
PowerCoefficients coefficients_from_hardware(const HardwareProfile& profile, int coherence_block);

/// Total consumed energy per channel use for M antennas, K users and an
/// average radiated energy tx_energy (J/c.u.).
double total_power(const PowerCoefficients& coeffs, int antennas, int users, double tx_energy);

}  // namespace eemimo
