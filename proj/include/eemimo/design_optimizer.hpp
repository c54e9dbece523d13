#pragma once

#include <optional>
#include <vector>

#include "eemimo/ee_core.hpp"
#include "eemimo/power_model.hpp"

namespace eemimo {

/// Ranges of the joint (M, K) search. Cells with M < K are skipped.
struct SearchSpace {
  IntRange antennas{1, 1000};
  IntRange users{1, 500};
  std::optional<double> rho_cap;

  void validate(const PowerCoefficients& coeffs) const;
};

/// Default search space: M <= 1000, K <= min(T - 1, 500).
SearchSpace default_search_space(const PowerCoefficients& coeffs);

/// EE-optimal rho for (M, K), clipped to the cap when one is set. M = K gives 0.
double capped_optimal_power(int antennas, int users, const PowerCoefficients& coeffs, double a_lambda,
                            std::optional<double> rho_cap);

/// Exhaustive (M, K) scan with the closed-form power for each cell. Ties go
/// to smaller M, then smaller K. Parallel over cells; results are reduced in
/// index order so the answer does not depend on the thread count.
DesignPoint exhaustive_search(const SearchSpace& space, const PowerCoefficients& coeffs, double a_lambda);

/// Single-threaded reference for exhaustive_search.
DesignPoint exhaustive_search_serial(const SearchSpace& space, const PowerCoefficients& coeffs,
                                     double a_lambda);

struct AlternatingTrace {
  // points[0] is the initial point, points[i] the iterate after iteration i.
  std::vector<DesignPoint> points;
  bool converged = false;
  // Executed iterations, including the final one that left M and K unchanged.
  int iteration_count = 0;
  // Iterations after which (M, K) stopped changing (the last moving one).
  int settled_after = 0;
};

/// Alternating K -> M -> rho updates with the closed-form optimizers and
/// integer refinement. Stops when an iteration leaves M and K unchanged or
/// after max_iter iterations (converged stays false).
AlternatingTrace alternating_optimize(const DesignPoint& init, const PowerCoefficients& coeffs,
                                      double a_lambda, int max_iter = 50);

struct SurfaceRow {
  int antennas;
  int users;
  double rho;
  double ee;
};

/// Every (M, K) cell of the space with M >= K, ordered by K then M.
std::vector<SurfaceRow> ee_surface(const SearchSpace& space, const PowerCoefficients& coeffs, double a_lambda);

std::vector<SurfaceRow> ee_surface_serial(const SearchSpace& space, const PowerCoefficients& coeffs,
                                          double a_lambda);

}  // namespace eemimo
