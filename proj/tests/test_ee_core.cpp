#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eemimo/ee_core.hpp"
#include "eemimo/errors.hpp"
#include "eemimo/lambert.hpp"
#include "eemimo/propagation.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace eemimo;

namespace {

constexpr double kE = std::numbers::e;

struct DefaultScenario : ::testing::Test {
  PowerCoefficients c = coefficients_from_hardware(HardwareProfile{});
  double a = a_lambda(PropagationModel{});
};

// Number of strict interior local maxima of samples of f.
int local_maxima(const std::function<double(double)>& f, double lo, double hi, int n, bool log_spaced) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    v[i] = f(log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const bool left = i == 0 || v[i] > v[i - 1];
    const bool right = i == n - 1 || v[i] > v[i + 1];
    count += left && right;
  }
  return count;
}

double central_difference(const std::function<double(double)>& f, double x) {
  const double h = 1e-5 * std::abs(x);
  return (f(x + h) - f(x - h)) / (2.0 * h) * std::abs(x) / f(x);
}

}  // namespace

TEST_F(DefaultScenario, EeZfEdges) {
  EXPECT_EQ(ee_zf(100, 10, 0.0, c, a), 0.0);
  EXPECT_EQ(ee_zf(10, 10, 3.0, c, a), 0.0);
  EXPECT_THROW(ee_zf(9, 10, 1.0, c, a), DomainError);
  EXPECT_THROW(ee_zf(6000, 5760, 1.0, c, a), DomainError);
  EXPECT_THROW(ee_zf(10, 0, 1.0, c, a), DomainError);
  EXPECT_THROW(ee_zf(10, 2, -1.0, c, a), DomainError);
  EXPECT_LT(ee_zf(10'000'000, 10, 1.0, c, a), 1e-2 * ee_zf(100, 10, 1.0, c, a));
  EXPECT_LT(ee_zf(100, 10, 1e12, c, a), 1e-3 * ee_zf(100, 10, 1.0, c, a));
}

TEST_F(DefaultScenario, EeZfDirectEvaluation) {
  const double expected = oracle::ee_zf_direct(165, 85, 4.6097, c, a);
  EXPECT_NEAR(ee_zf(165, 85, 4.6097, c, a), expected, 1e-13 * expected);
  EXPECT_NEAR(expected, 7.5278676117e6, 1e-3);
}

TEST(Quasiconcave, BranchPointArgument) {
  EXPECT_EQ(maximize_quasiconcave({1.0, 1.0, 0.0, 1.0, 1.0}), 0.0);
}

TEST(Quasiconcave, MatchesGoldenSection) {
  const QuasiconcaveProblem p{0.0, 1.0, 2.0, 1.0, 1.0};
  const double z = maximize_quasiconcave(p);
  EXPECT_DOUBLE_EQ(z, lambert::exp_w_plus_one(2.0 / kE));
  const double golden = oracle::golden_max([&](double x) { return p.objective(x); }, 1.0 + 1e-9, 100.0, 1e-12);
  EXPECT_NEAR(z, golden, 1e-6);
}

TEST(Quasiconcave, StationarityCondition) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const QuasiconcaveProblem p{3.0 * u(rng) - 2.0, std::pow(10.0, 4 * u(rng) - 2), std::pow(10.0, 4 * u(rng) - 2),
                                std::pow(10.0, 4 * u(rng) - 2), 1.0};
    const double z = maximize_quasiconcave(p);
    const double y = p.a + p.b * z;
    ASSERT_GT(y, 0.0);
    const double lhs = (p.b * p.c - p.a * p.d) / y;
    const double rhs = p.d * (std::log(y) - 1.0);
    ASSERT_NEAR(lhs, rhs, 1e-9 * std::max({std::abs(lhs), p.d, p.b * p.c / y})) << i;
  }
}

TEST(Quasiconcave, Validation) {
  EXPECT_THROW(maximize_quasiconcave({1.0, 0.0, 1.0, 1.0, 1.0}), DomainError);
  EXPECT_THROW(maximize_quasiconcave({1.0, 1.0, -1.0, 1.0, 1.0}), DomainError);
  EXPECT_THROW(maximize_quasiconcave({1.0, 1.0, 1.0, 0.0, 1.0}), DomainError);
  // (bc - ad)/(de) well below -1/e.
  EXPECT_THROW(maximize_quasiconcave({3.0, 1.0, 0.0, 1.0, 1.0}), DomainError);
}

TEST_F(DefaultScenario, OptimalAntennasAtReportedPoint) {
  const double m = optimal_antennas(85, 4.6097, c, a);
  const int refined = refine_integer(m, [&](int x) { return ee_zf(x, 85, 4.6097, c, a); }, {85, 100000});
  EXPECT_GE(refined, 162);
  EXPECT_LE(refined, 168);
}

TEST_F(DefaultScenario, OptimalAntennasCircuitMonotonicity) {
  const double base = optimal_antennas(40, 3.0, c, a);
  PowerCoefficients more_static = c, more_per_antenna = c;
  for (double& v : more_static.static_terms) v *= 2.0;
  for (double& v : more_per_antenna.per_antenna_terms) v *= 2.0;
  EXPECT_GT(optimal_antennas(40, 3.0, more_static, a), base);
  EXPECT_LT(optimal_antennas(40, 3.0, more_per_antenna, a), base);
}

TEST_F(DefaultScenario, OptimalAntennasDegenerate) {
  PowerCoefficients free_antennas = c;
  free_antennas.per_antenna_terms = {0.0, 0.0, 0.0};
  EXPECT_THROW(optimal_antennas(10, 1.0, free_antennas, a), DegenerateError);
  EXPECT_THROW(optimal_antennas(10, 0.0, c, a), DomainError);
}

TEST_F(DefaultScenario, OptimalPowerAtReportedPoint) {
  EXPECT_NEAR(optimal_power(165, 85, c, a) / 4.6097, 1.0, 0.05);
  EXPECT_THROW(optimal_power(85, 85, c, a), DomainError);
}

TEST_F(DefaultScenario, OptimalPowerVanishesWithCircuit) {
  PowerCoefficients tiny = c;
  double previous = optimal_power(50, 10, c, a);
  for (int i = 0; i < 8; ++i) {
    for (double& v : tiny.static_terms) v *= 1e-2;
    for (double& v : tiny.per_antenna_terms) v *= 1e-2;
    const double rho = optimal_power(50, 10, tiny, a);
    EXPECT_LT(rho, previous);
    EXPECT_GT(rho, 0.0);
    previous = rho;
  }
  EXPECT_LT(previous, 1e-6);
}

TEST(RandomScenarios, ClosedFormsMatchSearches) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    const scenario::Random s = scenario::draw(rng);
    const scenario::Check m = scenario::antennas(s);
    EXPECT_LT(m.relative_error(), 1e-4);
    EXPECT_EQ(m.refined, m.brute);
    EXPECT_LT(scenario::power(s).relative_error(), 1e-4);
    const scenario::Check k = scenario::users(s);
    EXPECT_LT(k.relative_error(), 1e-4);
    EXPECT_EQ(k.refined, k.brute);
  }
}

TEST_F(DefaultScenario, PowerScalingBound) {
  for (int m = 100; m <= 1000; m += 100) EXPECT_GE(optimal_power(m, 85, c, a), power_scaling_lower_bound(m, 85, c, a));
  // O(M / ln M) growth: bound * ln M / M tends to C1 / 2.
  const double c1 = c.amplifier_efficiency * c.per_antenna_sum(85) / (85 * a);
  double previous_gap = INFINITY;
  for (int m = 1000; m <= 1000000000; m *= 10) {
    const double gap = std::abs(power_scaling_lower_bound(m, 85, c, a) * std::log(m) / m / (c1 / 2) - 1.0);
    EXPECT_LT(gap, previous_gap) << m;
    previous_gap = gap;
  }
  EXPECT_LT(previous_gap, 0.2);
}

TEST_F(DefaultScenario, PowerScalingWithoutPerAntennaCost) {
  PowerCoefficients flat = c;
  flat.per_antenna_terms = {0.0, 0.0, 0.0};
  double previous_bound = INFINITY, previous_rho = INFINITY;
  for (int m = 100; m <= 100000; m *= 2) {
    const double bound = power_scaling_lower_bound(m, 85, flat, a);
    const double rho = optimal_power(m, 85, flat, a);
    EXPECT_LT(bound, previous_bound);
    EXPECT_LT(rho, previous_rho);
    EXPECT_GE(rho, bound);
    previous_bound = bound;
    previous_rho = rho;
  }
}

TEST_F(DefaultScenario, PowerScalingPrecondition) {
  PowerCoefficients tiny = c;
  for (double& v : tiny.static_terms) v *= 1e-9;
  for (double& v : tiny.per_antenna_terms) v *= 1e-9;
  EXPECT_THROW(power_scaling_lower_bound(90, 85, tiny, a), DomainError);
  EXPECT_THROW(power_scaling_lower_bound(85, 85, c, a), DomainError);
}

TEST_F(DefaultScenario, OptimalUsersAtReportedPoint) {
  const double beta = 165.0 / 85.0, rho_tot = 85 * 4.6097;
  const double k = optimal_users(beta, rho_tot, c, a);
  const int refined =
      refine_integer(k, [&](int x) { return users_objective(beta, rho_tot, x, c, a); }, {1, c.coherence_block - 1});
  EXPECT_GE(refined, 82);
  EXPECT_LE(refined, 88);
}

TEST_F(DefaultScenario, OptimalUsersQuadraticCase) {
  PowerCoefficients no_cubic = c;
  no_cubic.static_terms[3] = 0.0;
  no_cubic.per_antenna_terms[2] = 0.0;
  const QuarticCoefficients q = users_problem(2.0, 200.0, no_cubic, a);
  const double lin = q.a * q.c[2] + q.b * q.c[1];
  const double u = q.b * q.c[0] / lin;
  const double closed = std::sqrt(u * u + q.c[0] * q.a / lin) - u;
  EXPECT_NEAR(optimal_users(2.0, 200.0, no_cubic, a), closed, 1e-12 * closed);
}

TEST_F(DefaultScenario, OptimalUsersValidation) {
  EXPECT_THROW(optimal_users(1.0, 10.0, c, a), DomainError);
  EXPECT_THROW(optimal_users(2.0, 0.0, c, a), DomainError);
}

TEST_F(DefaultScenario, UsersObjectiveIsQuarticObjective) {
  const QuarticCoefficients q = users_problem(1.7, 300.0, c, a);
  for (double k : {1.0, 10.0, 50.0, 400.0}) {
    const double direct = users_objective(1.7, 300.0, k, c, a);
    EXPECT_NEAR(q.objective(k), direct, 1e-12 * direct);
  }
}

TEST(RefineInteger, Examples) {
  auto peak = [](int x) { return -std::abs(x - 165.2); };
  EXPECT_EQ(refine_integer(164.6, peak, {1, 1000}), 165);
  EXPECT_EQ(refine_integer(17.0, [](int) { return 0.0; }, {1, 100}), 17);
  EXPECT_EQ(refine_integer(-3.5, peak, {5, 1000}), 5);
  EXPECT_EQ(refine_integer(2000.5, peak, {5, 1000}), 1000);
  EXPECT_EQ(refine_integer(4.5, [](int) { return 1.0; }, {1, 10}), 4);
  EXPECT_THROW(refine_integer(3.0, peak, {5, 4}), ValidationError);
}

TEST_F(DefaultScenario, Unimodality) {
  EXPECT_EQ(local_maxima([&](double m) { return ee_zf_relaxed(m, 85, 4.6, c, a); }, 85.001, 1e5, 1000, true), 1);
  EXPECT_EQ(local_maxima([&](double r) { return ee_zf_relaxed(165, 85, r, c, a); }, 1e-4, 1e4, 1000, true), 1);
  EXPECT_EQ(local_maxima([&](double k) { return users_objective(1.94, 390.0, k, c, a); }, 1.0, 5759.0, 1000, false),
            1);
}

TEST_F(DefaultScenario, Stationarity) {
  const double m = optimal_antennas(85, 4.6, c, a);
  EXPECT_LE(std::abs(central_difference([&](double x) { return ee_zf_relaxed(x, 85, 4.6, c, a); }, m)), 1e-6);
  const double r = optimal_power(165, 85, c, a);
  EXPECT_LE(std::abs(central_difference([&](double x) { return ee_zf_relaxed(165, 85, x, c, a); }, r)), 1e-6);
  const double k = optimal_users(1.94, 390.0, c, a);
  EXPECT_LE(std::abs(central_difference([&](double x) { return users_objective(1.94, 390.0, x, c, a); }, k)), 1e-6);
}

TEST_F(DefaultScenario, CrossConsistencyAtJointOptimum) {
  // (166, 85) with its optimal rho is the exhaustive optimum of this scenario.
  const int m = 166, k = 85;
  const double rho = optimal_power(m, k, c, a);
  EXPECT_EQ(refine_integer(optimal_antennas(k, rho, c, a), [&](int x) { return ee_zf(x, k, rho, c, a); },
                           {k, 100000}),
            m);
  const double beta = static_cast<double>(m) / k, rho_tot = k * rho;
  const int k_refined = refine_integer(optimal_users(beta, rho_tot, c, a),
                                       [&](int x) { return users_objective(beta, rho_tot, x, c, a); }, {1, 5759});
  EXPECT_EQ(k_refined, k);
}
