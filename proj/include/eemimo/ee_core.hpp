#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "eemimo/power_model.hpp"

namespace eemimo {

/// Operating point of the downlink: M antennas, K users, normalized transmit
/// power rho (the per-UE ZF SINR is rho (M - K)) and its EE in bit/Joule.
struct DesignPoint {
  int antennas = 1;
  int users = 1;
  double rho = 0.0;
  double ee = 0.0;
};

/// Inclusive integer interval.
struct IntRange {
  int lo = 1;
  int hi = 1;
  bool empty() const { return lo > hi; }
};

/// maximize f log2(a + b z) / (c + d z) over z > -a/b.
struct QuasiconcaveProblem {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double d = 1.0;
  double f = 1.0;

  void validate() const;
  double objective(double z) const;
};

/// Constants of the user-count problem for fixed antennas per user beta and
/// fixed total power rho_tot:
///   maximize (a K - b K^2) / (c0 + c1 K + c2 K^2 + c3 K^3).
struct QuarticCoefficients {
  double a = 0.0;
  double b = 0.0;
  std::array<double, 4> c{};

  double objective(double users) const;
  /// Stationarity polynomial, ascending powers of K.
  std::array<double, 5> stationarity_polynomial() const;
};

/// EE of ZF with perfect CSI, bit/Joule. rho = 0 and M = K give 0.
double ee_zf(int antennas, int users, double rho, const PowerCoefficients& coeffs, double a_lambda);

/// Same expression with real-valued M and K (used for the relaxed problems).
double ee_zf_relaxed(double antennas, double users, double rho, const PowerCoefficients& coeffs,
                     double a_lambda);

/// Unique maximizer z_opt = (exp(W((bc - ad)/(de)) + 1) - a) / b.
double maximize_quasiconcave(const QuasiconcaveProblem& problem);

/// The antenna problem for fixed K and rho, written in the quasiconcave form with z = M.
QuasiconcaveProblem antenna_problem(int users, double rho, const PowerCoefficients& coeffs,
                                    double a_lambda);
/// The power problem for fixed M and K, with z = rho.
QuasiconcaveProblem power_problem(int antennas, int users, const PowerCoefficients& coeffs,
                                  double a_lambda);

/// Continuous EE-maximizing number of antennas for fixed K and rho. Throws
/// DegenerateError when the per-antenna circuit cost is zero.
double optimal_antennas(int users, double rho, const PowerCoefficients& coeffs, double a_lambda);

/// EE-maximizing rho for fixed M > K.
double optimal_power(int antennas, int users, const PowerCoefficients& coeffs, double a_lambda);

/// Large-M lower bound on optimal_power. Requires (M-K)(C0 + C1 M) - 1 >= e^2
/// with C0, C1 the circuit sums scaled by eta / (K A_lambda).
double power_scaling_lower_bound(int antennas, int users, const PowerCoefficients& coeffs,
                                 double a_lambda);

/// Real roots of a polynomial given in ascending powers. Exact-zero leading
/// coefficients lower the degree. Roots are sorted ascending.
std::vector<double> real_polynomial_roots(std::span<const double> ascending);

/// All real roots of the user-count stationarity quartic.
std::vector<double> solve_quartic(const QuarticCoefficients& q);

QuarticCoefficients users_problem(double beta, double rho_tot, const PowerCoefficients& coeffs,
                                  double a_lambda);

/// The user-count objective for beta = M/K and rho_tot = K rho, i.e. ee_zf
/// evaluated at (beta K, K, rho_tot / K).
double users_objective(double beta, double rho_tot, double users, const PowerCoefficients& coeffs,
                       double a_lambda);

/// Continuous EE-maximizing number of users in (0, T) for fixed beta > 1 and
/// rho_tot > 0. Throws InfeasibleError if no stationary point lies in (0, T).
double optimal_users(double beta, double rho_tot, const PowerCoefficients& coeffs, double a_lambda);

/// Best of floor/ceil of a continuous optimum, clamped to the feasible range.
/// Ties go to the smaller integer.
int refine_integer(double continuous_opt, const std::function<double(int)>& objective,
                   IntRange feasible);

}  // namespace eemimo
