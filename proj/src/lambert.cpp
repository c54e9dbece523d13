#include "eemimo/lambert.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "eemimo/errors.hpp"

namespace eemimo::lambert {

namespace {

constexpr double kE = std::numbers::e;
constexpr int kMaxHalleySteps = 64;

// Below this distance p = sqrt(2(e x + 1)) from the branch point the
// series alone is accurate to machine precision.
constexpr double kSeriesOnlyRadius = 1e-3;

// Expansion of W0 around x = -1/e in p = sqrt(2(e x + 1)).
double branch_series(double p) {
  constexpr double c[] = {-1.0,
                          1.0,
                          -1.0 / 3.0,
                          11.0 / 72.0,
                          -43.0 / 540.0,
                          769.0 / 17280.0,
                          -221.0 / 8505.0,
                          680863.0 / 43545600.0};
  double w = 0.0;
  for (int i = 7; i >= 0; --i) w = w * p + c[i];
  return w;
}

double halley(double x, double w) {
  for (int step = 0; step < kMaxHalleySteps; ++step) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double next = w - f / denom;
    if (!std::isfinite(next)) break;
    if (std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(next))) {
      return next;
    }
    w = next;
  }
  return w;
}

double initial_guess(double x) {
  if (x <= 3.0) {
    // Rational fit, good to a few percent on [-0.3, 3].
    return x * (1.0 + 4.0 / 3.0 * x) / (1.0 + 7.0 / 3.0 * x + 5.0 / 6.0 * x * x);
  }
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double w0_from_branch(double delta) {
  if (std::isnan(delta)) throw DomainError("lambert::w0: argument is NaN");
  if (delta < -kDomainSlack) {
    throw DomainError("lambert::w0: argument below -1/e (offset " + std::to_string(delta) + ")");
  }
  if (delta <= 0.0) return -1.0;
  const double x = kBranchPoint + delta;
  const double p = std::sqrt(2.0 * kE * delta);
  const double guess = branch_series(p);
  if (p < kSeriesOnlyRadius) return guess;
  if (p < 0.5) return halley(x, guess);
  return halley(x, initial_guess(x));
}

double w0(double x) {
  if (std::isnan(x)) throw DomainError("lambert::w0: argument is NaN");
  if (x == 0.0) return 0.0;
  if (x == std::numeric_limits<double>::infinity()) return x;
  if (x < kBranchPoint + 0.05) return w0_from_branch(x - kBranchPoint);
  return halley(x, initial_guess(x));
}

namespace {

double exp_plus_one(double x, double w) {
  // For |w| >= 1 the identity exp(w) = x / w avoids amplifying the error in w.
  if (std::abs(w) < 1.0) return std::exp(w + 1.0);
  return kE * x / w;
}

}  // namespace

double exp_w_plus_one(double x) { return exp_plus_one(x, w0(x)); }

double exp_w_plus_one_from_branch(double delta) {
  const double w = w0_from_branch(delta);
  return exp_plus_one(kBranchPoint + delta, w);
}

}  // namespace eemimo::lambert
