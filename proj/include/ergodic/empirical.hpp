#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergodic/henon.hpp"
#include "ergodic/map1d.hpp"

namespace ergodic {

// Normalized histogram of an orbit (1D or 2D).  Weights always sum to 1;
// bounds are auto-expanded at most once, after which the run restarts so
// no mass ever falls off the grid.
struct EmpiricalMeasure {
    int dims = 1;
    double lo[2] = {0.0, 0.0};
    double hi[2] = {1.0, 1.0};
    int grid[2] = {256, 1};
    std::vector<double> weights; // row-major, grid[0] * grid[1]
    long long n_samples = 0;
    long long burn_in = 0;
    std::uint64_t seed = 0;
    bool expanded = false;

    std::size_t cells() const { return weights.size(); }
    double total() const;
    double cell_center(int axis, int index) const;
    int cell_index(int axis, double v) const;
};

EmpiricalMeasure empirical_measure_1d(const Map1D& map, double x0, long long burn_in,
                                      long long n, int grid, double lo, double hi,
                                      std::uint64_t seed);

EmpiricalMeasure empirical_measure_2d(const HenonMap& map, const Vec2& z0, long long burn_in,
                                      long long n, int grid_x, int grid_y, double lo_x,
                                      double hi_x, double lo_y, double hi_y, std::uint64_t seed);

// Dense CSV (cell_x, cell_y, weight); the JSON header is written by the CLI.
std::string measure_to_csv(const EmpiricalMeasure& m);

} // namespace ergodic
