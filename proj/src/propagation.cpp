#include "eemimo/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eemimo/errors.hpp"

namespace eemimo {

namespace {

// Trapezoid mass of each segment of a tabulated pdf.
std::vector<double> segment_masses(const EmpiricalPdf& pdf) {
  std::vector<double> mass(pdf.x.size() - 1);
  for (std::size_t i = 0; i + 1 < pdf.x.size(); ++i) {
    mass[i] = 0.5 * (pdf.density[i] + pdf.density[i + 1]) * (pdf.x[i + 1] - pdf.x[i]);
  }
  return mass;
}

void validate_pdf(const EmpiricalPdf& pdf) {
  if (pdf.x.empty() || pdf.x.size() != pdf.density.size()) {
    throw ValidationError("empirical pdf needs matching, non-empty x and density columns");
  }
  if (pdf.x.front() <= 0.0) {
    throw DomainError("empirical pdf support reaches x <= 0; E{sigma^2/lambda} diverges");
  }
  if (pdf.x.size() == 1) return;
  for (std::size_t i = 0; i < pdf.x.size(); ++i) {
    if (!(pdf.density[i] >= 0.0)) throw ValidationError("empirical pdf density must be >= 0");
    if (i > 0 && !(pdf.x[i] > pdf.x[i - 1])) {
      throw ValidationError("empirical pdf x values must be strictly increasing");
    }
  }
  double total = 0.0;
  for (double m : segment_masses(pdf)) total += m;
  if (std::abs(total - 1.0) > 1e-6) {
    throw ValidationError("empirical pdf must integrate to 1 (got " + std::to_string(total) + ")");
  }
}

double annulus_a_lambda(const AnnulusUniform& a, double sigma2) {
  const double k = a.pathloss_exponent;
  const double num = std::pow(a.d_max_m, k + 2.0) - std::pow(a.d_min_m, k + 2.0);
  const double den = a.d_max_m * a.d_max_m - a.d_min_m * a.d_min_m;
  return sigma2 / (a.attenuation * (1.0 + k / 2.0)) * num / den;
}

// sigma^2 * int f(x)/x dx with f linear on each segment, in closed form.
double empirical_a_lambda(const EmpiricalPdf& pdf, double sigma2) {
  if (pdf.x.size() == 1) return sigma2 / pdf.x.front();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pdf.x.size(); ++i) {
    const double x0 = pdf.x[i], x1 = pdf.x[i + 1];
    const double slope = (pdf.density[i + 1] - pdf.density[i]) / (x1 - x0);
    const double intercept = pdf.density[i] - slope * x0;
    sum += intercept * std::log(x1 / x0) + slope * (x1 - x0);
  }
  if (!std::isfinite(sum)) throw DomainError("E{sigma^2/lambda} diverges for the empirical pdf");
  return sigma2 * sum;
}

double empirical_sample(const EmpiricalPdf& pdf, RandomStream& rng) {
  if (pdf.x.size() == 1) return pdf.x.front();
  const std::vector<double> mass = segment_masses(pdf);
  double total = 0.0;
  for (double m : mass) total += m;
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * total;
  std::size_t i = 0;
  for (; i + 1 < mass.size() && u > mass[i]; ++i) u -= mass[i];
  // Invert the quadratic CDF of the linear segment: f0 t + (f1 - f0) t^2 / (2 h) = u.
  const double h = pdf.x[i + 1] - pdf.x[i];
  const double f0 = pdf.density[i], f1 = pdf.density[i + 1];
  const double a = 0.5 * (f1 - f0) / h;
  double t;
  if (std::abs(a) * h < 1e-12 * std::max(f0, f1)) {
    t = f0 > 0.0 ? u / f0 : 0.0;
  } else {
    const double disc = std::max(0.0, f0 * f0 + 4.0 * a * u);
    t = 2.0 * u / (f0 + std::sqrt(disc));
  }
  return pdf.x[i] + std::clamp(t, 0.0, h);
}

}  // namespace

void PropagationModel::validate() const {
  if (!(noise_variance > 0.0)) throw ValidationError("noise_variance must be > 0");
  if (const auto* a = std::get_if<AnnulusUniform>(&distribution)) {
    if (!(a->attenuation > 0.0)) throw ValidationError("attenuation must be > 0");
    if (!(a->pathloss_exponent > 0.0)) throw ValidationError("pathloss_exponent must be > 0");
    if (!(a->d_min_m > 0.0 && a->d_min_m < a->d_max_m)) {
      throw ValidationError("distances must satisfy 0 < d_min < d_max");
    }
  } else {
    validate_pdf(std::get<EmpiricalPdf>(distribution));
  }
}

double a_lambda(const PropagationModel& model) {
  model.validate();
  if (const auto* a = std::get_if<AnnulusUniform>(&model.distribution)) {
    return annulus_a_lambda(*a, model.noise_variance);
  }
  return empirical_a_lambda(std::get<EmpiricalPdf>(model.distribution), model.noise_variance);
}

double sample_user_variance(const PropagationModel& model, RandomStream& rng) {
  if (const auto* a = std::get_if<AnnulusUniform>(&model.distribution)) {
    // Uniform over the annulus area: d^2 is uniform on [d_min^2, d_max^2].
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double dmin2 = a->d_min_m * a->d_min_m;
    const double d = std::sqrt(dmin2 + u * (a->d_max_m * a->d_max_m - dmin2));
    return a->attenuation / std::pow(d, a->pathloss_exponent);
  }
  return empirical_sample(std::get<EmpiricalPdf>(model.distribution), rng);
}

EmpiricalPdf read_empirical_pdf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open empirical pdf file '" + path + "'");
  EmpiricalPdf pdf;
  std::string line;
  int line_no = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, f;
    if (!(row >> x >> f)) {
      if (pdf.x.empty() && !header_skipped) {
        header_skipped = true;
        continue;
      }
      throw ValidationError(path + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    pdf.x.push_back(x);
    pdf.density.push_back(f);
  }
  return pdf;
}

}  // namespace eemimo
