#pragma once

#include <span>
#include <vector>

#include "eemimo/mc_link_sim.hpp"

namespace eemimo::mc::detail {

// M x K matrix with independent CN(0, variance[k]) entries, drawn column by
// column, real part before imaginary part.
CMatrix draw_complex_gaussian(int rows, std::span<const double> column_variance, RandomStream& rng);

// Channel variances used by one trial: a fresh draw when users are
// resampled, otherwise the fixed set.
std::vector<double> trial_variances(const PropagationModel& propagation, const McConfig& mc, int users,
                                    std::span<const double> fixed, RandomStream& rng);

std::vector<double> fixed_user_variances(const PropagationModel& propagation, const McConfig& mc, int users);

// sum_k log2(1 + |E_kk|^2 / (sum_{l != k} |E_kl|^2 + sigma^2)) for E = H^H V.
double log_sum_rate(const CMatrix& effective, double sigma2);

// Neumaier-compensated sum in index order.
double ordered_sum(std::span<const double> values);

void check_link_dimensions(int antennas, int users, int coherence_block);

}  // namespace eemimo::mc::detail
