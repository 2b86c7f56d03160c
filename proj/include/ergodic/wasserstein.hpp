#pragma once

#include "ergodic/empirical.hpp"

namespace ergodic {

// Exact 1D Wasserstein-1 distance between weighted point sets (cell
// centers with their weights); metrizes weak* convergence on compact
// supports.
double w1_weighted_points(std::vector<double> pos_a, std::vector<double> wgt_a,
                          std::vector<double> pos_b, std::vector<double> wgt_b);

double w1_distance_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Mean W1 of projections onto directions theta_k = k*pi/n_directions.
double sliced_w1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, int n_directions);

} // namespace ergodic
