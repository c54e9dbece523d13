#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "eemimo/ee_core.hpp"
#include "eemimo/errors.hpp"

namespace eemimo {

namespace {

struct Evaluation {
  double value;
  double derivative;
};

Evaluation horner(std::span<const double> p, double x) {
  double v = 0.0, dv = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) {
    dv = dv * x + v;
    v = v * x + p[i];
  }
  return {v, dv};
}

double polish(std::span<const double> p, double x) {
  double residual = std::abs(horner(p, x).value);
  for (int step = 0; step < 4 && residual > 0.0; ++step) {
    const Evaluation e = horner(p, x);
    if (e.derivative == 0.0) break;
    const double next = x - e.value / e.derivative;
    const double next_residual = std::abs(horner(p, next).value);
    if (!(next_residual < residual)) break;
    x = next;
    residual = next_residual;
  }
  return x;
}

}  // namespace

std::vector<double> real_polynomial_roots(std::span<const double> ascending) {
  std::size_t n = ascending.size();
  while (n > 0 && ascending[n - 1] == 0.0) --n;
  if (n == 0) throw DomainError("polynomial is identically zero");
  const std::span<const double> p = ascending.first(n);
  const int degree = static_cast<int>(n) - 1;
  if (degree == 0) return {};

  std::size_t low = 0;
  while (p[low] == 0.0) ++low;
  std::vector<double> roots;
  if (low > 0) roots.push_back(0.0);
  const int reduced = degree - static_cast<int>(low);

  if (reduced > 0) {
    // Substitute x = s y so the reduced polynomial's end coefficients balance.
    const double lead = p[n - 1];
    const double s = std::pow(std::abs(p[low] / lead), 1.0 / reduced);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(reduced, reduced);
    for (int i = 1; i < reduced; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < reduced; ++i) {
      // Monic coefficient of y^i: p[low + i] s^i / (lead s^reduced).
      companion(i, reduced - 1) = -p[low + i] / lead * std::pow(s, i - reduced);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw DomainError("companion eigenvalue solve failed");
    const auto& eig = solver.eigenvalues();
    for (int i = 0; i < reduced; ++i) {
      const double re = eig[i].real(), im = eig[i].imag();
      if (std::abs(im) > 1e-7 * std::max(1.0, std::abs(re))) continue;
      roots.push_back(polish(p, s * re));
    }
  }

  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); }),
              roots.end());
  return roots;
}

std::vector<double> solve_quartic(const QuarticCoefficients& q) {
  if (q.c[0] == 0.0 && q.c[1] == 0.0 && q.c[2] == 0.0 && q.c[3] == 0.0) {
    throw DomainError("solve_quartic: all circuit coefficients are zero");
  }
  const std::array<double, 5> p = q.stationarity_polynomial();
  return real_polynomial_roots(p);
}

}  // namespace eemimo
