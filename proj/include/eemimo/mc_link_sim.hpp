#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eemimo/ee_core.hpp"
#include "eemimo/power_model.hpp"
#include "eemimo/propagation.hpp"

namespace eemimo::mc {

using CMatrix = Eigen::MatrixXcd;

enum class Scheme { kZf, kRzf, kMrt };
enum class Csi { kPerfect, kMmseEstimated };

std::string to_string(Scheme scheme);
std::string to_string(Csi csi);

struct PrecoderSpec {
  Scheme scheme = Scheme::kZf;
  Csi csi = Csi::kPerfect;
  // Uplink pilot energy per symbol relative to the downlink per-UE energy
  // rho * A_lambda. Pilots are K symbols long.
  double pilot_energy_ratio = 1.0;
  // Fixed RZF regularizer; unset means K sigma^2 / power_budget.
  std::optional<double> rzf_regularization;
};

struct McConfig {
  int trials = 1000;
  std::uint64_t seed = 1;
  bool resample_users = true;

  void validate() const;
};

struct ChannelRealization {
  CMatrix h;  // M x K, column k ~ CN(0, lambda_k I)
  std::vector<double> variances;
};

/// Independent stream for one trial, a pure function of (seed, trial).
RandomStream trial_stream(std::uint64_t seed, std::uint64_t trial);

ChannelRealization draw_channel(int antennas, int users, std::span<const double> variances, RandomStream& rng);

/// V = sqrt(rho sigma^2 (M-K)) H (H^H H)^-1. Requires M > K and full column rank.
CMatrix precode_zf(const CMatrix& h, double rho, double sigma2);

/// Equal-power matched filtering, tr(V^H V) = power_budget.
CMatrix precode_mrt(const CMatrix& h, double power_budget);

/// V proportional to H (H^H H + xi I)^-1 with tr(V^H V) = power_budget.
CMatrix precode_rzf(const CMatrix& h, double power_budget, double sigma2,
                    std::optional<double> regularization = std::nullopt);

double rzf_default_regularization(int users, double sigma2, double power_budget);

/// Per-column LMMSE estimate from y_k = sqrt(p) h_k + n_k, n_k ~ CN(0, sigma^2 I),
/// where p = pilot_energy is the total pilot energy of one user.
CMatrix mmse_estimate(const CMatrix& h, std::span<const double> variances, double pilot_energy, double sigma2,
                      RandomStream& rng);

/// Total pilot energy of one user under the PrecoderSpec convention.
double pilot_energy(const PrecoderSpec& precoder, int users, double rho, double a_lambda);

/// Monte Carlo means over the trials.
struct LinkStats {
  double rate_per_ue = 0.0;  // bit/c.u., includes the (1 - K/T) prelog
  double sum_rate = 0.0;
  double tx_energy = 0.0;  // J/c.u.
  int trials = 0;
};

/// Monte Carlo link for one (M, K, scheme). Construction draws every trial
/// once and keeps the Gram-domain statistics the precoders need, so the
/// power parameter can be swept on common random numbers. For MRT and RZF the
/// power budget is rho K A_lambda; ZF uses rho directly.
class TrialBank {
 public:
  TrialBank(int antennas, int users, int coherence_block, const PrecoderSpec& precoder,
            const PropagationModel& propagation, const McConfig& mc);

  /// OpenMP over trials; bit-identical to evaluate_serial.
  LinkStats evaluate(double rho) const;
  LinkStats evaluate_serial(double rho) const;

  int antennas() const { return antennas_; }
  int users() const { return users_; }
  double a_lambda() const { return a_lambda_; }

 private:
  struct Trial {
    double trace_inverse = 0.0;   // ZF: tr((H^H H)^-1)
    Eigen::VectorXd gain;         // MRT: G_kk;  RZF: eigenvalues of G
    Eigen::VectorXd spill;        // MRT: sum_l |G_kl|^2 / G_ll
    Eigen::MatrixXd weights;      // RZF: |U_ki|^2
    CMatrix gram, cross, noise_gram;  // estimated CSI: H^H H, H^H N, N^H N
    std::vector<double> variances;
  };
  struct Outcome {
    double log_sum;  // sum over users of log2(1 + SINR)
    double tx_energy;
  };

  Trial build_trial(int index) const;
  Outcome evaluate_trial(const Trial& trial, double rho) const;
  Outcome evaluate_estimated(const Trial& trial, double rho) const;
  LinkStats reduce(const std::vector<Outcome>& outcomes) const;

  int antennas_;
  int users_;
  int coherence_block_;
  PrecoderSpec precoder_;
  PropagationModel propagation_;
  McConfig mc_;
  double a_lambda_;
  std::vector<double> fixed_variances_;
  std::vector<Trial> trials_;
};

/// MC estimate of the per-UE rate and transmit energy.
LinkStats average_rates(int antennas, int users, int coherence_block, const PrecoderSpec& precoder, double rho,
                        const PropagationModel& propagation, const McConfig& mc);

/// Reference implementation: builds H, the estimate and V explicitly for
/// every trial, single-threaded. Consumes the random streams identically to
/// TrialBank.
LinkStats average_rates_reference(int antennas, int users, int coherence_block, const PrecoderSpec& precoder,
                                  double rho, const PropagationModel& propagation, const McConfig& mc);

/// Sum rate over total power with the MC-average transmit energy.
double ee_from_stats(const LinkStats& stats, int antennas, int users, const PowerCoefficients& coeffs);

double ee_mc(int antennas, int users, double rho, const PrecoderSpec& precoder, const PowerCoefficients& coeffs,
             const PropagationModel& propagation, const McConfig& mc);

struct RhoSearch {
  double rho = 0.0;
  double ee = 0.0;
  LinkStats stats;
  bool flat = false;  // EE varied less than 1e-9 relative across the bracket
};

struct RhoSearchOptions {
  double log10_min = -4.0;
  double log10_max = 6.0;
  int grid_points = 41;
  double relative_tolerance = 1e-3;
};

/// Maximizes the MC EE over rho on a log grid followed by golden-section
/// refinement in log rho.
RhoSearch optimize_rho(const TrialBank& bank, const PowerCoefficients& coeffs, const RhoSearchOptions& options = {});

RhoSearch optimize_rho_mc(int antennas, int users, const PrecoderSpec& precoder, const PowerCoefficients& coeffs,
                          const PropagationModel& propagation, const McConfig& mc,
                          const RhoSearchOptions& options = {});

struct UserSearch {
  int users = 1;
  RhoSearch best;
};

/// Best K in the range for fixed M, each K with its MC-optimal rho. Assumes
/// the EE is unimodal in K (integer golden-section, then a local scan).
UserSearch optimize_users_mc(int antennas, IntRange users, const PrecoderSpec& precoder,
                             const PowerCoefficients& coeffs, const PropagationModel& propagation,
                             const McConfig& mc, const RhoSearchOptions& options = {});

}  // namespace eemimo::mc
