#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "eemimo/errors.hpp"
#include "eemimo/propagation.hpp"
#include "oracles.hpp"

using namespace eemimo;

namespace {

// pdf of lambda = D d^-kappa with d^2 uniform on [d_min^2, d_max^2], tabulated
// on a log-spaced grid.
EmpiricalPdf induced_annulus_pdf(const AnnulusUniform& a, int points) {
  const double k = a.pathloss_exponent;
  const double lo = a.attenuation * std::pow(a.d_max_m, -k), hi = a.attenuation * std::pow(a.d_min_m, -k);
  const double scale = 2.0 / (k * (a.d_max_m * a.d_max_m - a.d_min_m * a.d_min_m)) * std::pow(a.attenuation, 2.0 / k);
  EmpiricalPdf pdf;
  for (int i = 0; i < points; ++i) {
    const double x = i == points - 1 ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    pdf.x.push_back(x);
    pdf.density.push_back(scale * std::pow(x, -2.0 / k - 1.0));
  }
  // Renormalize the interpolant.
  double total = 0.0;
  for (int i = 0; i + 1 < points; ++i) total += 0.5 * (pdf.density[i] + pdf.density[i + 1]) * (pdf.x[i + 1] - pdf.x[i]);
  for (double& f : pdf.density) f /= total;
  return pdf;
}

}  // namespace

TEST(ALambda, TableValue) {
  EXPECT_NEAR(a_lambda(PropagationModel{}), 1.2458145548212217e-08, 1e-22);
}

TEST(ALambda, DiscMonteCarlo) {
  const PropagationModel model;
  const double mc = oracle::a_lambda_disc_mc(AnnulusUniform{}, model.noise_variance, 10'000'000, 11);
  EXPECT_NEAR(a_lambda(model) / mc, 1.0, 1e-3);
}

TEST(ALambda, ConstantGainLimit) {
  PropagationModel model;
  AnnulusUniform a;
  a.pathloss_exponent = 1e-12;
  model.distribution = a;
  EXPECT_NEAR(a_lambda(model), model.noise_variance / a.attenuation, 1e-9 * model.noise_variance / a.attenuation);
}

TEST(ALambda, EmpiricalMatchesClosedForm) {
  PropagationModel model;
  const double closed = a_lambda(model);
  model.distribution = induced_annulus_pdf(AnnulusUniform{}, 20001);
  EXPECT_NEAR(a_lambda(model) / closed, 1.0, 1e-6);
}

TEST(ALambda, Scaling) {
  PropagationModel model;
  const double base = a_lambda(model);
  model.noise_variance *= 3.0;
  EXPECT_NEAR(a_lambda(model), 3.0 * base, 1e-14 * base);
  model.noise_variance /= 3.0;
  std::get<AnnulusUniform>(model.distribution).attenuation *= 2.0;
  EXPECT_NEAR(a_lambda(model), base / 2.0, 1e-14 * base);
}

TEST(ALambda, GrowsWithRadiusAndExponent) {
  for (double kappa = 2.0; kappa <= 5.0; kappa += 0.25) {
    double previous = 0.0;
    for (double dmax = 50.0; dmax <= 2000.0; dmax += 50.0) {
      PropagationModel model;
      AnnulusUniform a;
      a.pathloss_exponent = kappa;
      a.d_max_m = dmax;
      model.distribution = a;
      const double v = a_lambda(model);
      EXPECT_GT(v, 0.0);
      EXPECT_GT(v, previous);
      previous = v;
      a.pathloss_exponent = kappa + 0.25;
      model.distribution = a;
      EXPECT_GT(a_lambda(model), v);
    }
  }
}

TEST(Propagation, Validation) {
  PropagationModel model;
  AnnulusUniform a;
  a.d_min_m = 300.0;
  a.d_max_m = 250.0;
  model.distribution = a;
  EXPECT_THROW(model.validate(), ValidationError);
  model = {};
  model.noise_variance = 0.0;
  EXPECT_THROW(model.validate(), ValidationError);
  model = {};
  model.distribution = EmpiricalPdf{{1.0, 2.0}, {1.0, 1.0}};
  EXPECT_NO_THROW(model.validate());
  model.distribution = EmpiricalPdf{{1.0, 2.0}, {1.0, 1.2}};
  EXPECT_THROW(model.validate(), ValidationError);
  model.distribution = EmpiricalPdf{{0.0, 1.0}, {1.0, 1.0}};
  EXPECT_THROW(a_lambda(model), DomainError);
  model.distribution = EmpiricalPdf{{2.0, 1.0}, {1.0, 1.0}};
  EXPECT_THROW(model.validate(), ValidationError);
}

TEST(Sampling, MeanInverseGainMatchesALambda) {
  const PropagationModel model;
  RandomStream rng(5);
  long double sum = 0.0L;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += model.noise_variance / sample_user_variance(model, rng);
  EXPECT_NEAR(static_cast<double>(sum / n) / a_lambda(model), 1.0, 5e-3);
}

TEST(Sampling, DegenerateAnnulus) {
  PropagationModel model;
  AnnulusUniform a;
  a.d_min_m = a.d_max_m - 1e-6;
  model.distribution = a;
  RandomStream rng(1);
  const double expected = a.attenuation / std::pow(a.d_max_m, a.pathloss_exponent);
  for (int i = 0; i < 1000; ++i) EXPECT_NEAR(sample_user_variance(model, rng), expected, 1e-6 * expected);
}

TEST(Sampling, PointMass) {
  PropagationModel model;
  model.distribution = EmpiricalPdf{{3e-9}, {1.0}};
  RandomStream rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_user_variance(model, rng), 3e-9);
  EXPECT_DOUBLE_EQ(a_lambda(model), 1e-20 / 3e-9);
}

TEST(Sampling, EmpiricalInverseCdf) {
  // Triangular pdf on [1, 3] rising from 0 to 1.
  PropagationModel model;
  model.noise_variance = 1.0;
  model.distribution = EmpiricalPdf{{1.0, 3.0}, {0.0, 1.0}};
  RandomStream rng(9);
  const int n = 400'000;
  long double mean = 0.0L, inverse = 0.0L;
  for (int i = 0; i < n; ++i) {
    const double x = sample_user_variance(model, rng);
    ASSERT_GE(x, 1.0);
    ASSERT_LE(x, 3.0);
    mean += x;
    inverse += 1.0 / x;
  }
  EXPECT_NEAR(static_cast<double>(mean / n), 7.0 / 3.0, 5e-3);
  EXPECT_NEAR(static_cast<double>(inverse / n) / a_lambda(model), 1.0, 5e-3);
}

TEST(EmpiricalCsv, ReadsHeaderAndComments) {
  const std::string path = ::testing::TempDir() + "pdf.csv";
  {
    std::ofstream out(path);
    out << "# tabulated pdf\nx,density\n1,0.5\n2,0.5\n";
  }
  const EmpiricalPdf pdf = read_empirical_pdf(path);
  ASSERT_EQ(pdf.x.size(), 2u);
  EXPECT_EQ(pdf.x[1], 2.0);
  EXPECT_EQ(pdf.density[0], 0.5);
  {
    std::ofstream out(path);
    out << "x,density\n1,0.5\noops\n";
  }
  EXPECT_THROW(read_empirical_pdf(path), ValidationError);
  std::remove(path.c_str());
  EXPECT_THROW(read_empirical_pdf(path), ValidationError);
}
