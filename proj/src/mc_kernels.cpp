#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "eemimo/errors.hpp"
#include "eemimo/mc_link_sim.hpp"
#include "mc_internal.hpp"
#include "parallel.hpp"

namespace eemimo::mc {

TrialBank::TrialBank(int antennas, int users, int coherence_block, const PrecoderSpec& precoder,
                     const PropagationModel& propagation, const McConfig& mc)
    : antennas_(antennas),
      users_(users),
      coherence_block_(coherence_block),
      precoder_(precoder),
      propagation_(propagation),
      mc_(mc),
      a_lambda_(eemimo::a_lambda(propagation)) {
  detail::check_link_dimensions(antennas, users, coherence_block);
  mc.validate();
  if (!(precoder.pilot_energy_ratio > 0.0)) throw ValidationError("pilot_energy_ratio must be > 0");
  fixed_variances_ = detail::fixed_user_variances(propagation_, mc_, users_);
  if (precoder_.scheme == Scheme::kZf && antennas_ == users_) return;  // no array gain: zero rate, zero power

  trials_.resize(mc_.trials);
  eemimo::detail::parallel_for(mc_.trials, [&](long long t) { trials_[t] = build_trial(static_cast<int>(t)); });
}

TrialBank::Trial TrialBank::build_trial(int index) const {
  RandomStream rng = trial_stream(mc_.seed, static_cast<std::uint64_t>(index));
  Trial trial;
  trial.variances = detail::trial_variances(propagation_, mc_, users_, fixed_variances_, rng);
  const ChannelRealization channel = draw_channel(antennas_, users_, trial.variances, rng);
  const CMatrix& h = channel.h;

  if (precoder_.csi == Csi::kMmseEstimated) {
    const std::vector<double> noise_variance(users_, propagation_.noise_variance);
    const CMatrix noise = detail::draw_complex_gaussian(antennas_, noise_variance, rng);
    trial.gram = h.adjoint() * h;
    trial.cross = h.adjoint() * noise;
    trial.noise_gram = noise.adjoint() * noise;
    return trial;
  }

  const CMatrix gram = h.adjoint() * h;
  switch (precoder_.scheme) {
    case Scheme::kZf: {
      Eigen::LLT<CMatrix> llt(gram);
      if (llt.info() != Eigen::Success) throw DomainError("ZF: channel matrix is rank deficient");
      trial.trace_inverse = llt.solve(CMatrix::Identity(users_, users_)).trace().real();
      break;
    }
    case Scheme::kMrt: {
      trial.gain = gram.diagonal().real();
      trial.spill.resize(users_);
      for (int k = 0; k < users_; ++k) {
        double s = 0.0;
        for (int l = 0; l < users_; ++l) s += std::norm(gram(k, l)) / trial.gain[l];
        trial.spill[k] = s;
      }
      break;
    }
    case Scheme::kRzf: {
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
      if (eig.info() != Eigen::Success) throw DomainError("RZF: eigen-decomposition failed");
      trial.gain = eig.eigenvalues().cwiseMax(0.0);
      trial.weights = eig.eigenvectors().cwiseAbs2();
      break;
    }
  }
  return trial;
}

TrialBank::Outcome TrialBank::evaluate_trial(const Trial& trial, double rho) const {
  if (precoder_.csi == Csi::kMmseEstimated) return evaluate_estimated(trial, rho);
  const double sigma2 = propagation_.noise_variance;
  const double budget = rho * users_ * a_lambda_;
  switch (precoder_.scheme) {
    case Scheme::kZf: {
      // H^H V = sqrt(rho sigma^2 (M-K)) I: every user sees SINR rho (M-K).
      const double gap = antennas_ - users_;
      return {users_ * std::log2(1.0 + rho * gap), rho * sigma2 * gap * trial.trace_inverse};
    }
    case Scheme::kMrt: {
      const double per_user = budget / users_;
      double log_sum = 0.0;
      for (int k = 0; k < users_; ++k) {
        const double signal = per_user * trial.gain[k];
        const double interference = per_user * std::max(trial.spill[k] - trial.gain[k], 0.0);
        log_sum += std::log2(1.0 + signal / (interference + sigma2));
      }
      return {log_sum, budget};
    }
    case Scheme::kRzf: {
      // H^H V = c U diag(g / (g + xi)) U^H with G = U diag(g) U^H.
      const double xi =
          precoder_.rzf_regularization.value_or(rzf_default_regularization(users_, sigma2, budget));
      const Eigen::ArrayXd g = trial.gain.array();
      const Eigen::ArrayXd shrink = g / (g + xi);
      const double norm = (g / (g + xi).square()).sum();
      const double c2 = budget / norm;
      const Eigen::VectorXd diag = trial.weights * shrink.matrix();
      const Eigen::VectorXd total = trial.weights * shrink.square().matrix();
      double log_sum = 0.0;
      for (int k = 0; k < users_; ++k) {
        const double signal = c2 * diag[k] * diag[k];
        const double interference = std::max(c2 * total[k] - signal, 0.0);
        log_sum += std::log2(1.0 + signal / (interference + sigma2));
      }
      return {log_sum, budget};
    }
  }
  return {0.0, 0.0};
}

TrialBank::Outcome TrialBank::evaluate_estimated(const Trial& trial, double rho) const {
  // Estimate = (sqrt(p) H + N) A with A = diag(sqrt(p) lambda_k / (p lambda_k + sigma^2)), so
  //   Est^H Est = A (p G + sqrt(p) (X + X^H) + Q) A  and  H^H Est = (sqrt(p) G + X) A.
  const double sigma2 = propagation_.noise_variance;
  const double budget = rho * users_ * a_lambda_;
  const double p = pilot_energy(precoder_, users_, rho, a_lambda_);
  const double root_p = std::sqrt(p);
  Eigen::VectorXd shrink(users_);
  for (int k = 0; k < users_; ++k) {
    const double lambda = trial.variances[k];
    shrink[k] = root_p * lambda / (p * lambda + sigma2);
  }
  const auto a = shrink.asDiagonal();
  const CMatrix est_gram = a * (p * trial.gram + root_p * (trial.cross + trial.cross.adjoint()) + trial.noise_gram) * a;
  const CMatrix cross = (root_p * trial.gram + trial.cross) * a;

  CMatrix effective;
  double tx_energy = budget;
  switch (precoder_.scheme) {
    case Scheme::kZf: {
      Eigen::LLT<CMatrix> llt(est_gram);
      if (llt.info() != Eigen::Success) throw DomainError("ZF: estimated channel is rank deficient");
      const CMatrix inverse = llt.solve(CMatrix::Identity(users_, users_));
      const double c2 = rho * sigma2 * (antennas_ - users_);
      effective = std::sqrt(c2) * cross * inverse;
      tx_energy = c2 * inverse.trace().real();
      break;
    }
    case Scheme::kMrt: {
      const Eigen::VectorXd norms = est_gram.diagonal().real().cwiseSqrt();
      effective = std::sqrt(budget / users_) * cross * norms.cwiseInverse().asDiagonal();
      break;
    }
    case Scheme::kRzf: {
      const double xi =
          precoder_.rzf_regularization.value_or(rzf_default_regularization(users_, sigma2, budget));
      CMatrix reg = est_gram;
      reg.diagonal().array() += xi;
      Eigen::LLT<CMatrix> llt(reg);
      if (llt.info() != Eigen::Success) throw DomainError("RZF: regularized Gram matrix is singular");
      const CMatrix inverse = llt.solve(CMatrix::Identity(users_, users_));
      const double norm = (inverse * est_gram * inverse).trace().real();
      effective = std::sqrt(budget / norm) * cross * inverse;
      break;
    }
  }
  return {detail::log_sum_rate(effective, sigma2), tx_energy};
}

LinkStats TrialBank::reduce(const std::vector<Outcome>& outcomes) const {
  std::vector<double> log_sums(outcomes.size()), energies(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    log_sums[i] = outcomes[i].log_sum;
    energies[i] = outcomes[i].tx_energy;
  }
  const double prelog = 1.0 - static_cast<double>(users_) / coherence_block_;
  LinkStats stats;
  stats.trials = mc_.trials;
  stats.rate_per_ue = prelog * detail::ordered_sum(log_sums) / (static_cast<double>(mc_.trials) * users_);
  stats.sum_rate = users_ * stats.rate_per_ue;
  stats.tx_energy = detail::ordered_sum(energies) / mc_.trials;
  return stats;
}

LinkStats TrialBank::evaluate(double rho) const {
  if (!(rho >= 0.0)) throw ValidationError("rho must be >= 0");
  if (trials_.empty() || rho == 0.0) return reduce(std::vector<Outcome>(mc_.trials, Outcome{0.0, 0.0}));
  std::vector<Outcome> outcomes(trials_.size());
  eemimo::detail::parallel_for(static_cast<long long>(trials_.size()),
                               [&](long long t) { outcomes[t] = evaluate_trial(trials_[t], rho); });
  return reduce(outcomes);
}

LinkStats TrialBank::evaluate_serial(double rho) const {
  if (!(rho >= 0.0)) throw ValidationError("rho must be >= 0");
  if (trials_.empty() || rho == 0.0) return reduce(std::vector<Outcome>(mc_.trials, Outcome{0.0, 0.0}));
  std::vector<Outcome> outcomes;
  outcomes.reserve(trials_.size());
  for (const Trial& trial : trials_) outcomes.push_back(evaluate_trial(trial, rho));
  return reduce(outcomes);
}

LinkStats average_rates(int antennas, int users, int coherence_block, const PrecoderSpec& precoder, double rho,
                        const PropagationModel& propagation, const McConfig& mc) {
  return TrialBank(antennas, users, coherence_block, precoder, propagation, mc).evaluate(rho);
}

double ee_mc(int antennas, int users, double rho, const PrecoderSpec& precoder, const PowerCoefficients& coeffs,
             const PropagationModel& propagation, const McConfig& mc) {
  const LinkStats stats = average_rates(antennas, users, coeffs.coherence_block, precoder, rho, propagation, mc);
  return ee_from_stats(stats, antennas, users, coeffs);
}

RhoSearch optimize_rho(const TrialBank& bank, const PowerCoefficients& coeffs, const RhoSearchOptions& options) {
  if (options.grid_points < 3) throw ValidationError("optimize_rho: need at least 3 grid points");
  RhoSearch best;
  best.ee = -1.0;
  auto probe = [&](double log_rho) {
    const double rho = std::exp(log_rho);
    const LinkStats stats = bank.evaluate(rho);
    const double ee = ee_from_stats(stats, bank.antennas(), bank.users(), coeffs);
    if (ee > best.ee) best = {rho, ee, stats, false};
    return ee;
  };

  const double ln10 = std::log(10.0);
  const double lo_log = options.log10_min * ln10, hi_log = options.log10_max * ln10;
  const double step = (hi_log - lo_log) / (options.grid_points - 1);
  double grid_min = std::numeric_limits<double>::infinity();
  double grid_max = -grid_min;
  int best_index = 0;
  for (int i = 0; i < options.grid_points; ++i) {
    const double ee = probe(lo_log + i * step);
    if (ee > grid_max) best_index = i;
    grid_min = std::min(grid_min, ee);
    grid_max = std::max(grid_max, ee);
  }
  if (grid_max - grid_min <= 1e-9 * std::abs(grid_max)) {
    best.flat = true;
    return best;
  }

  // Golden-section on log rho inside the two cells around the best grid point.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo_log + std::max(best_index - 1, 0) * step;
  double b = lo_log + std::min(best_index + 1, options.grid_points - 1) * step;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = probe(x1), f2 = probe(x2);
  while (b - a > options.relative_tolerance) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = probe(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = probe(x1);
    }
  }
  return best;
}

RhoSearch optimize_rho_mc(int antennas, int users, const PrecoderSpec& precoder, const PowerCoefficients& coeffs,
                          const PropagationModel& propagation, const McConfig& mc,
                          const RhoSearchOptions& options) {
  const TrialBank bank(antennas, users, coeffs.coherence_block, precoder, propagation, mc);
  return optimize_rho(bank, coeffs, options);
}

UserSearch optimize_users_mc(int antennas, IntRange users, const PrecoderSpec& precoder,
                             const PowerCoefficients& coeffs, const PropagationModel& propagation,
                             const McConfig& mc, const RhoSearchOptions& options) {
  const int cap = std::min(precoder.scheme == Scheme::kZf ? antennas - 1 : antennas, coeffs.coherence_block - 1);
  users.lo = std::max(users.lo, 1);
  users.hi = std::min(users.hi, cap);
  if (users.empty()) throw InfeasibleError("optimize_users_mc: empty user range");

  std::map<int, RhoSearch> memo;
  auto value = [&](int k) {
    auto it = memo.find(k);
    if (it == memo.end()) {
      it = memo.emplace(k, optimize_rho_mc(antennas, k, precoder, coeffs, propagation, mc, options)).first;
    }
    return it->second.ee;
  };

  int lo = users.lo, hi = users.hi;
  while (hi - lo > 4) {
    int m1 = lo + static_cast<int>(std::lround(0.381966 * (hi - lo)));
    int m2 = lo + static_cast<int>(std::lround(0.618034 * (hi - lo)));
    if (m1 == m2) ++m2;
    if (value(m1) < value(m2)) {
      lo = m1 + 1;
    } else {
      hi = m2 - 1;
    }
  }
  UserSearch result;
  double best_ee = -1.0;
  for (int k = lo; k <= hi; ++k) {
    if (value(k) > best_ee) {
      best_ee = value(k);
      result = {k, memo.at(k)};
    }
  }
  return result;
}

}  // namespace eemimo::mc
