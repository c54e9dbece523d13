#include "eemimo/design_optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "eemimo/errors.hpp"
#include "parallel.hpp"

namespace eemimo {

namespace {

constexpr int kAntennaCeiling = 1 << 30;

struct Cell {
  int antennas;
  int users;
};

// Cells ordered by K, then M.
std::vector<Cell> enumerate_cells(const SearchSpace& space) {
  std::vector<Cell> cells;
  for (int k = space.users.lo; k <= space.users.hi; ++k) {
    for (int m = std::max(k, space.antennas.lo); m <= space.antennas.hi; ++m) cells.push_back({m, k});
  }
  return cells;
}

SurfaceRow evaluate_cell(Cell cell, const SearchSpace& space, const PowerCoefficients& coeffs,
                         double a_lambda) {
  const double rho = capped_optimal_power(cell.antennas, cell.users, coeffs, a_lambda, space.rho_cap);
  return {cell.antennas, cell.users, rho, ee_zf(cell.antennas, cell.users, rho, coeffs, a_lambda)};
}

bool better(const SurfaceRow& candidate, const SurfaceRow& incumbent) {
  if (candidate.ee != incumbent.ee) return candidate.ee > incumbent.ee;
  if (candidate.antennas != incumbent.antennas) return candidate.antennas < incumbent.antennas;
  return candidate.users < incumbent.users;
}

void check_search_inputs(const SearchSpace& space, const PowerCoefficients& coeffs) {
  space.validate(coeffs);
  coeffs.validate();
  const auto& per_antenna = coeffs.per_antenna_terms;
  if (std::all_of(per_antenna.begin(), per_antenna.end(), [](double c) { return c == 0.0; })) {
    throw DegenerateError("exhaustive_search: all per-antenna coefficients are zero, optimum unbounded in M");
  }
}

DesignPoint best_of(const std::vector<SurfaceRow>& rows) {
  if (rows.empty()) throw InfeasibleError("exhaustive_search: no feasible (M, K) cell");
  SurfaceRow best = rows.front();
  for (const SurfaceRow& row : rows) {
    if (better(row, best)) best = row;
  }
  return {best.antennas, best.users, best.rho, best.ee};
}

}  // namespace

void SearchSpace::validate(const PowerCoefficients& coeffs) const {
  if (users.empty() || antennas.empty()) throw ValidationError("search ranges must be non-empty");
  if (users.lo < 1) throw ValidationError("search: k_min must be >= 1");
  if (users.hi >= coeffs.coherence_block) throw ValidationError("search: k_max must be < T");
  if (antennas.lo < 1) throw ValidationError("search: m_min must be >= 1");
  if (rho_cap && !(*rho_cap > 0.0)) throw ValidationError("search: rho_cap must be > 0");
}

SearchSpace default_search_space(const PowerCoefficients& coeffs) {
  SearchSpace space;
  space.users.hi = std::min(coeffs.coherence_block - 1, 500);
  return space;
}

double capped_optimal_power(int antennas, int users, const PowerCoefficients& coeffs, double a_lambda,
                            std::optional<double> rho_cap) {
  if (antennas == users) return 0.0;
  const double rho = optimal_power(antennas, users, coeffs, a_lambda);
  // The objective is quasiconcave in rho, so the capped optimum is the cap.
  return rho_cap ? std::min(rho, *rho_cap) : rho;
}

std::vector<SurfaceRow> ee_surface_serial(const SearchSpace& space, const PowerCoefficients& coeffs,
                                          double a_lambda) {
  space.validate(coeffs);
  std::vector<SurfaceRow> rows;
  for (const Cell& cell : enumerate_cells(space)) rows.push_back(evaluate_cell(cell, space, coeffs, a_lambda));
  return rows;
}

std::vector<SurfaceRow> ee_surface(const SearchSpace& space, const PowerCoefficients& coeffs, double a_lambda) {
  space.validate(coeffs);
  const std::vector<Cell> cells = enumerate_cells(space);
  std::vector<SurfaceRow> rows(cells.size());
  detail::parallel_for(static_cast<long long>(cells.size()),
                       [&](long long i) { rows[i] = evaluate_cell(cells[i], space, coeffs, a_lambda); });
  return rows;
}

DesignPoint exhaustive_search(const SearchSpace& space, const PowerCoefficients& coeffs, double a_lambda) {
  check_search_inputs(space, coeffs);
  return best_of(ee_surface(space, coeffs, a_lambda));
}

DesignPoint exhaustive_search_serial(const SearchSpace& space, const PowerCoefficients& coeffs,
                                     double a_lambda) {
  check_search_inputs(space, coeffs);
  return best_of(ee_surface_serial(space, coeffs, a_lambda));
}

AlternatingTrace alternating_optimize(const DesignPoint& init, const PowerCoefficients& coeffs,
                                      double a_lambda, int max_iter) {
  coeffs.validate();
  if (init.users < 1 || init.users >= coeffs.coherence_block) {
    throw ValidationError("alternating_optimize: initial K must be in [1, T)");
  }
  if (init.antennas <= init.users) throw ValidationError("alternating_optimize: initial M must be > K");
  if (!(init.rho > 0.0)) throw ValidationError("alternating_optimize: initial rho must be > 0");
  if (max_iter < 1) throw ValidationError("alternating_optimize: max_iter must be >= 1");

  auto ee_at = [&](const DesignPoint& p) { return ee_zf(p.antennas, p.users, p.rho, coeffs, a_lambda); };

  AlternatingTrace trace;
  DesignPoint current = init;
  current.ee = ee_at(current);
  trace.points.push_back(current);

  for (int iteration = 1; iteration <= max_iter; ++iteration) {
    const DesignPoint start = current;

    // Users, with beta = M/K and rho_tot = K rho frozen at the current iterate.
    const double beta = static_cast<double>(current.antennas) / current.users;
    const double rho_tot = current.users * current.rho;
    const double k_continuous = optimal_users(beta, rho_tot, coeffs, a_lambda);
    const int k_new = refine_integer(
        k_continuous, [&](int k) { return users_objective(beta, rho_tot, k, coeffs, a_lambda); },
        {1, coeffs.coherence_block - 1});
    DesignPoint moved{std::max(k_new + 1, static_cast<int>(std::lround(beta * k_new))), k_new,
                      rho_tot / k_new, 0.0};
    moved.ee = ee_at(moved);
    if (moved.ee >= current.ee) current = moved;

    // Antennas.
    const DesignPoint snapshot = current;
    const double m_continuous = optimal_antennas(current.users, current.rho, coeffs, a_lambda);
    current.antennas = refine_integer(
        m_continuous,
        [&](int m) { return ee_zf(m, snapshot.users, snapshot.rho, coeffs, a_lambda); },
        {current.users + 1, kAntennaCeiling});
    current.ee = ee_at(current);

    // Power.
    current.rho = optimal_power(current.antennas, current.users, coeffs, a_lambda);
    current.ee = ee_at(current);

    trace.points.push_back(current);
    trace.iteration_count = iteration;
    if (current.antennas == start.antennas && current.users == start.users) {
      trace.converged = true;
      break;
    }
    trace.settled_after = iteration;
  }
  return trace;
}

}  // namespace eemimo
