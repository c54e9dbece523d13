#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace eemimo {

/// Random stream used by every sampling routine. Parallel workers get their
/// own stream (see mc::trial_stream).
using RandomStream = std::mt19937_64;

/// Users uniform over the annulus d_min <= d <= d_max, lambda = D / d^kappa.
struct AnnulusUniform {
  double attenuation = std::pow(10.0, -3.53);  // D
  double pathloss_exponent = 3.76;            // kappa
  double d_min_m = 35.0;
  double d_max_m = 250.0;
};

/// Tabulated pdf of the channel variance, linear between the sample points.
/// A single row is a point mass at that value.
struct EmpiricalPdf {
  std::vector<double> x;
  std::vector<double> density;
};

struct PropagationModel {
  std::variant<AnnulusUniform, EmpiricalPdf> distribution = AnnulusUniform{};
  double noise_variance = 1e-20;  // sigma^2, J/c.u.

  void validate() const;
};

/// A_lambda = E{sigma^2 / lambda}.
double a_lambda(const PropagationModel& model);

/// One draw of a user's channel variance lambda.
double sample_user_variance(const PropagationModel& model, RandomStream& rng);

/// Reads a two-column CSV (x, density). Lines starting with '#' and a
/// non-numeric header row are skipped.
EmpiricalPdf read_empirical_pdf(const std::string& path);

}  // namespace eemimo
