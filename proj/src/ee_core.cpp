#include "eemimo/ee_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "eemimo/errors.hpp"
#include "eemimo/lambert.hpp"

namespace eemimo {

namespace {

constexpr double kE = std::numbers::e;

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

void check_users(double users, const PowerCoefficients& coeffs) {
  if (users < 1.0) throw DomainError("K must be >= 1");
  if (users >= coeffs.coherence_block) throw DomainError("K must be < T (no room for data)");
}

}  // namespace

void QuasiconcaveProblem::validate() const {
  if (!(b > 0.0 && d > 0.0 && f > 0.0)) throw DomainError("quasiconcave problem needs b, d, f > 0");
  if (!(c >= 0.0)) throw DomainError("quasiconcave problem needs c >= 0");
  if (!std::isfinite(a)) throw DomainError("quasiconcave problem needs finite a");
}

double QuasiconcaveProblem::objective(double z) const {
  return f * std::log2(a + b * z) / (c + d * z);
}

double QuarticCoefficients::objective(double users) const {
  const double k = users;
  const double denom = c[0] + k * (c[1] + k * (c[2] + k * c[3]));
  return (a * k - b * k * k) / denom;
}

std::array<double, 5> QuarticCoefficients::stationarity_polynomial() const {
  return {c[0] * a, -2.0 * b * c[0], -(a * c[2] + b * c[1]), -2.0 * c[3] * a, b * c[3]};
}

double ee_zf_relaxed(double antennas, double users, double rho, const PowerCoefficients& coeffs,
                     double a_lambda) {
  check_users(users, coeffs);
  if (antennas < users) throw DomainError("dimension error: M must be >= K");
  if (!(rho >= 0.0)) throw DomainError("rho must be >= 0");
  const double rate = users * (1.0 - users / coeffs.coherence_block) * log2_1p(rho * (antennas - users));
  const double power = rho * users * a_lambda / coeffs.amplifier_efficiency + coeffs.circuit(antennas, users);
  return rate == 0.0 ? 0.0 : rate / power;
}

double ee_zf(int antennas, int users, double rho, const PowerCoefficients& coeffs, double a_lambda) {
  return ee_zf_relaxed(antennas, users, rho, coeffs, a_lambda);
}

double maximize_quasiconcave(const QuasiconcaveProblem& p) {
  p.validate();
  // (bc - ad)/(de) = -1/e + delta. Writing delta = (bc/d + 1 - a)/e keeps
  // full relative precision when the argument approaches the branch point.
  const double delta = (p.b * p.c / p.d + (1.0 - p.a)) / kE;
  if (delta < -lambert::kDomainSlack) {
    throw DomainError("quasiconcave problem: (bc - ad)/(de) < -1/e, no stationary point");
  }
  return (lambert::exp_w_plus_one_from_branch(std::max(delta, 0.0)) - p.a) / p.b;
}

QuasiconcaveProblem antenna_problem(int users, double rho, const PowerCoefficients& coeffs,
                                    double a_lambda) {
  const double k = users;
  return {1.0 - k * rho, rho, rho * k * a_lambda / coeffs.amplifier_efficiency + coeffs.static_sum(k),
          coeffs.per_antenna_sum(k), k * (1.0 - k / coeffs.coherence_block)};
}

QuasiconcaveProblem power_problem(int antennas, int users, const PowerCoefficients& coeffs,
                                  double a_lambda) {
  const double k = users;
  return {1.0, static_cast<double>(antennas - users), coeffs.circuit(antennas, k),
          k * a_lambda / coeffs.amplifier_efficiency, k * (1.0 - k / coeffs.coherence_block)};
}

double optimal_antennas(int users, double rho, const PowerCoefficients& coeffs, double a_lambda) {
  check_users(users, coeffs);
  if (!(rho > 0.0)) throw DomainError("optimal_antennas: rho must be > 0");
  const QuasiconcaveProblem p = antenna_problem(users, rho, coeffs, a_lambda);
  if (p.d == 0.0) {
    throw DegenerateError("optimal_antennas: per-antenna circuit cost is zero, EE grows without bound in M");
  }
  return std::max(static_cast<double>(users), maximize_quasiconcave(p));
}

double optimal_power(int antennas, int users, const PowerCoefficients& coeffs, double a_lambda) {
  check_users(users, coeffs);
  if (antennas <= users) throw DomainError("optimal_power: M must be > K");
  return maximize_quasiconcave(power_problem(antennas, users, coeffs, a_lambda));
}

double power_scaling_lower_bound(int antennas, int users, const PowerCoefficients& coeffs,
                                 double a_lambda) {
  check_users(users, coeffs);
  if (antennas <= users) throw DomainError("power_scaling_lower_bound: M must be > K");
  const double k = users;
  const double scale = coeffs.amplifier_efficiency / (k * a_lambda);
  const double c0 = scale * coeffs.static_sum(k);
  const double c1 = scale * coeffs.per_antenna_sum(k);
  const double gap = antennas - users;
  const double s = c0 + c1 * antennas;
  const double y = gap * s - 1.0;
  if (!(y >= kE * kE)) {
    throw DomainError("power_scaling_lower_bound: needs (M-K)(C0 + C1 M) - 1 >= e^2 (got " +
                      std::to_string(y) + ")");
  }
  const double ly = std::log(y);
  return (s - ly / gap) / (ly - 1.0);
}

QuarticCoefficients users_problem(double beta, double rho_tot, const PowerCoefficients& coeffs,
                                  double a_lambda) {
  if (!(beta > 1.0)) throw DomainError("optimal_users: beta = M/K must be > 1");
  if (!(rho_tot > 0.0)) throw DomainError("optimal_users: rho_tot must be > 0");
  QuarticCoefficients q;
  q.a = log2_1p(rho_tot * (beta - 1.0));
  q.b = q.a / coeffs.coherence_block;
  const auto& s = coeffs.static_terms;
  const auto& m = coeffs.per_antenna_terms;
  q.c = {s[0] + rho_tot * a_lambda / coeffs.amplifier_efficiency, s[1] + beta * m[0],
         s[2] + beta * m[1], s[3] + beta * m[2]};
  return q;
}

double users_objective(double beta, double rho_tot, double users, const PowerCoefficients& coeffs,
                       double a_lambda) {
  return ee_zf_relaxed(beta * users, users, rho_tot / users, coeffs, a_lambda);
}

double optimal_users(double beta, double rho_tot, const PowerCoefficients& coeffs, double a_lambda) {
  const QuarticCoefficients q = users_problem(beta, rho_tot, coeffs, a_lambda);
  const double t = coeffs.coherence_block;

  if (q.c[3] == 0.0) {
    // Quadratic stationarity condition; root written without cancellation.
    const double lin = q.a * q.c[2] + q.b * q.c[1];
    if (lin == 0.0) return t / 2.0;
    const double u = q.b * q.c[0] / lin;
    const double v = q.c[0] * q.a / lin;
    const double k = v / (std::sqrt(u * u + v) + u);
    if (!(k > 0.0 && k < t)) throw InfeasibleError("optimal_users: no stationary point in (0, T)");
    return k;
  }

  double best = std::numeric_limits<double>::quiet_NaN();
  double best_value = -std::numeric_limits<double>::infinity();
  for (double root : solve_quartic(q)) {
    if (!(root > 0.0 && root < t)) continue;
    const double value = q.objective(root);
    if (value > best_value) {
      best_value = value;
      best = root;
    }
  }
  if (std::isnan(best)) throw InfeasibleError("optimal_users: no stationary point in (0, T)");
  return best;
}

int refine_integer(double continuous_opt, const std::function<double(int)>& objective,
                   IntRange feasible) {
  if (feasible.empty()) throw ValidationError("refine_integer: empty feasible range");
  if (std::isnan(continuous_opt)) throw DomainError("refine_integer: continuous optimum is NaN");
  auto clamp = [&](double v) {
    return static_cast<int>(std::clamp(v, static_cast<double>(feasible.lo), static_cast<double>(feasible.hi)));
  };
  const int lo = clamp(std::floor(continuous_opt));
  const int hi = clamp(std::ceil(continuous_opt));
  if (lo == hi) return lo;
  return objective(hi) > objective(lo) ? hi : lo;
}

}  // namespace eemimo
