#include "eemimo/mc_link_sim.hpp"

#include <cmath>
#include <numbers>

#include "eemimo/errors.hpp"
#include "mc_internal.hpp"

namespace eemimo::mc {

namespace detail {

CMatrix draw_complex_gaussian(int rows, std::span<const double> column_variance, RandomStream& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int cols = static_cast<int>(column_variance.size());
  CMatrix out(rows, cols);
  for (int k = 0; k < cols; ++k) {
    const double scale = std::sqrt(column_variance[k] / 2.0);
    for (int m = 0; m < rows; ++m) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(m, k) = {scale * re, scale * im};
    }
  }
  return out;
}

std::vector<double> trial_variances(const PropagationModel& propagation, const McConfig& mc, int users,
                                    std::span<const double> fixed, RandomStream& rng) {
  if (!mc.resample_users) return {fixed.begin(), fixed.end()};
  std::vector<double> variances(users);
  for (double& v : variances) v = sample_user_variance(propagation, rng);
  return variances;
}

std::vector<double> fixed_user_variances(const PropagationModel& propagation, const McConfig& mc, int users) {
  if (mc.resample_users) return {};
  RandomStream rng = trial_stream(mc.seed, ~std::uint64_t{0});
  std::vector<double> variances(users);
  for (double& v : variances) v = sample_user_variance(propagation, rng);
  return variances;
}

double log_sum_rate(const CMatrix& effective, double sigma2) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < effective.rows(); ++k) {
    const double signal = std::norm(effective(k, k));
    const double interference = effective.row(k).squaredNorm() - signal;
    sum += std::log2(1.0 + signal / (std::max(interference, 0.0) + sigma2));
  }
  return sum;
}

double ordered_sum(std::span<const double> values) {
  double sum = 0.0, compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

void check_link_dimensions(int antennas, int users, int coherence_block) {
  if (users < 1 || antennas < 1) throw ValidationError("MC link: M and K must be >= 1");
  if (antennas < users) throw ValidationError("MC link: M must be >= K");
  if (users > coherence_block) throw ValidationError("MC link: K must be <= T");
}

}  // namespace detail

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kZf: return "zf";
    case Scheme::kRzf: return "rzf";
    case Scheme::kMrt: return "mrt";
  }
  return "?";
}

std::string to_string(Csi csi) { return csi == Csi::kPerfect ? "perfect" : "mmse"; }

void McConfig::validate() const {
  if (trials < 1) throw ValidationError("mc: trials must be >= 1");
}

RandomStream trial_stream(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return RandomStream(seq);
}

ChannelRealization draw_channel(int antennas, int users, std::span<const double> variances, RandomStream& rng) {
  if (antennas < 1 || users < 1) throw ValidationError("draw_channel: M and K must be >= 1");
  if (static_cast<int>(variances.size()) != users) {
    throw ValidationError("draw_channel: need one variance per user");
  }
  for (double v : variances) {
    if (!(v > 0.0)) throw ValidationError("draw_channel: channel variances must be > 0");
  }
  return {detail::draw_complex_gaussian(antennas, variances, rng), {variances.begin(), variances.end()}};
}

CMatrix precode_zf(const CMatrix& h, double rho, double sigma2) {
  const Eigen::Index m = h.rows(), k = h.cols();
  if (m <= k) throw ValidationError("precode_zf: needs M > K");
  const CMatrix gram = h.adjoint() * h;
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) throw DomainError("precode_zf: channel matrix is rank deficient");
  const double scale = std::sqrt(rho * sigma2 * static_cast<double>(m - k));
  // H (H^H H)^-1 = (solve(G, H^H))^H since G is Hermitian.
  return scale * llt.solve(h.adjoint()).adjoint();
}

CMatrix precode_mrt(const CMatrix& h, double power_budget) {
  if (!(power_budget > 0.0)) throw ValidationError("precode_mrt: power budget must be > 0");
  const double per_user = std::sqrt(power_budget / static_cast<double>(h.cols()));
  CMatrix v = h;
  for (Eigen::Index k = 0; k < h.cols(); ++k) v.col(k) *= per_user / h.col(k).norm();
  return v;
}

double rzf_default_regularization(int users, double sigma2, double power_budget) {
  return users * sigma2 / power_budget;
}

CMatrix precode_rzf(const CMatrix& h, double power_budget, double sigma2, std::optional<double> regularization) {
  if (!(power_budget > 0.0)) throw ValidationError("precode_rzf: power budget must be > 0");
  const Eigen::Index k = h.cols();
  const double xi = regularization.value_or(rzf_default_regularization(static_cast<int>(k), sigma2, power_budget));
  if (!(xi >= 0.0)) throw ValidationError("precode_rzf: regularization must be >= 0");
  CMatrix reg = h.adjoint() * h;
  reg.diagonal().array() += xi;
  Eigen::LLT<CMatrix> llt(reg);
  if (llt.info() != Eigen::Success) throw DomainError("precode_rzf: regularized Gram matrix is singular");
  CMatrix v = llt.solve(h.adjoint()).adjoint();
  v *= std::sqrt(power_budget / v.squaredNorm());
  return v;
}

CMatrix mmse_estimate(const CMatrix& h, std::span<const double> variances, double pilot_energy, double sigma2,
                      RandomStream& rng) {
  if (!(pilot_energy > 0.0)) throw ValidationError("mmse_estimate: pilot energy must be > 0");
  if (static_cast<Eigen::Index>(variances.size()) != h.cols()) {
    throw ValidationError("mmse_estimate: need one variance per user");
  }
  const std::vector<double> noise_variance(variances.size(), sigma2);
  const CMatrix noise = detail::draw_complex_gaussian(static_cast<int>(h.rows()), noise_variance, rng);
  const double root_p = std::sqrt(pilot_energy);
  CMatrix estimate(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    const double lambda = variances[k];
    const double shrink = root_p * lambda / (pilot_energy * lambda + sigma2);
    estimate.col(k) = shrink * (root_p * h.col(k) + noise.col(k));
  }
  return estimate;
}

double pilot_energy(const PrecoderSpec& precoder, int users, double rho, double a_lambda) {
  return users * precoder.pilot_energy_ratio * rho * a_lambda;
}

LinkStats average_rates_reference(int antennas, int users, int coherence_block, const PrecoderSpec& precoder,
                                  double rho, const PropagationModel& propagation, const McConfig& mc) {
  detail::check_link_dimensions(antennas, users, coherence_block);
  mc.validate();
  if (!(rho >= 0.0)) throw ValidationError("rho must be >= 0");
  const double sigma2 = propagation.noise_variance;
  const double a_lam = a_lambda(propagation);
  const double budget = rho * users * a_lam;
  const std::vector<double> fixed = detail::fixed_user_variances(propagation, mc, users);
  const bool zero_power = rho == 0.0 || (precoder.scheme == Scheme::kZf && antennas == users);

  std::vector<double> log_sums(mc.trials, 0.0), energies(mc.trials, 0.0);
  for (int t = 0; t < mc.trials; ++t) {
    if (zero_power) continue;
    RandomStream rng = trial_stream(mc.seed, static_cast<std::uint64_t>(t));
    const std::vector<double> lambda = detail::trial_variances(propagation, mc, users, fixed, rng);
    const ChannelRealization channel = draw_channel(antennas, users, lambda, rng);
    CMatrix known = channel.h;
    if (precoder.csi == Csi::kMmseEstimated) {
      known = mmse_estimate(channel.h, lambda, pilot_energy(precoder, users, rho, a_lam), sigma2, rng);
    }
    CMatrix v;
    switch (precoder.scheme) {
      case Scheme::kZf: v = precode_zf(known, rho, sigma2); break;
      case Scheme::kMrt: v = precode_mrt(known, budget); break;
      case Scheme::kRzf: v = precode_rzf(known, budget, sigma2, precoder.rzf_regularization); break;
    }
    log_sums[t] = detail::log_sum_rate(channel.h.adjoint() * v, sigma2);
    energies[t] = v.squaredNorm();
  }
  const double prelog = 1.0 - static_cast<double>(users) / coherence_block;
  LinkStats stats;
  stats.trials = mc.trials;
  stats.rate_per_ue = prelog * detail::ordered_sum(log_sums) / (static_cast<double>(mc.trials) * users);
  stats.sum_rate = users * stats.rate_per_ue;
  stats.tx_energy = detail::ordered_sum(energies) / mc.trials;
  return stats;
}

double ee_from_stats(const LinkStats& stats, int antennas, int users, const PowerCoefficients& coeffs) {
  const double power = total_power(coeffs, antennas, users, stats.tx_energy);
  return stats.sum_rate == 0.0 ? 0.0 : stats.sum_rate / power;
}

}  // namespace eemimo::mc
