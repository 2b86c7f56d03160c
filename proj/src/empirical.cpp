#include "ergodic/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergodic/errors.hpp"

namespace ergodic {

double EmpiricalMeasure::total() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double EmpiricalMeasure::cell_center(int axis, int index) const {
    const double w = (hi[axis] - lo[axis]) / grid[axis];
    return lo[axis] + (index + 0.5) * w;
}

int EmpiricalMeasure::cell_index(int axis, double v) const {
    const double w = (hi[axis] - lo[axis]) / grid[axis];
    int i = static_cast<int>((v - lo[axis]) / w);
    return std::clamp(i, 0, grid[axis] - 1);
}

EmpiricalMeasure empirical_measure_1d(const Map1D& map, double x0, long long burn_in,
                                      long long n, int grid, double lo, double hi,
                                      std::uint64_t seed) {
    if (n < 1) throw OutOfRange("n must be >= 1");
    EmpiricalMeasure m;
    m.dims = 1;
    m.grid[0] = grid;
    m.grid[1] = 1;
    m.lo[0] = lo;
    m.hi[0] = hi;
    m.n_samples = n;
    m.burn_in = burn_in;
    m.seed = seed;

    for (int attempt = 0; attempt < 2; ++attempt) {
        m.weights.assign(static_cast<std::size_t>(grid), 0.0);
        OrbitSampler sampler(map, x0, seed);
        for (long long i = 0; i < burn_in; ++i) sampler.step();
        bool out_of_bounds = false;
        double omin = 1e300, omax = -1e300;
        const double w = (m.hi[0] - m.lo[0]) / grid;
        for (long long i = 0; i < n; ++i) {
            const double x = sampler.step();
            omin = std::min(omin, x);
            omax = std::max(omax, x);
            if (x < m.lo[0] || x >= m.hi[0]) {
                out_of_bounds = true;
                if (attempt == 1) continue; // keep scanning to finish the pass
            } else {
                m.weights[static_cast<std::size_t>(std::clamp(
                    static_cast<int>((x - m.lo[0]) / w), 0, grid - 1))] += 1.0;
            }
        }
        if (!out_of_bounds || attempt == 1) break;
        // Expand once to the observed range (5% padding) and restart.
        const double pad = 0.05 * std::max(omax - omin, 1e-12);
        m.lo[0] = std::min(m.lo[0], omin - pad);
        m.hi[0] = std::max(m.hi[0], omax + pad);
        m.expanded = true;
    }
    const double t = m.total();
    if (t <= 0.0) throw OrbitDiverged("no orbit mass landed inside the bounds");
    for (auto& v : m.weights) v /= t;
    return m;
}

EmpiricalMeasure empirical_measure_2d(const HenonMap& map, const Vec2& z0, long long burn_in,
                                      long long n, int grid_x, int grid_y, double lo_x,
                                      double hi_x, double lo_y, double hi_y,
                                      std::uint64_t seed) {
    if (n < 1) throw OutOfRange("n must be >= 1");
    EmpiricalMeasure m;
    m.dims = 2;
    m.grid[0] = grid_x;
    m.grid[1] = grid_y;
    m.lo[0] = lo_x;
    m.hi[0] = hi_x;
    m.lo[1] = lo_y;
    m.hi[1] = hi_y;
    m.n_samples = n;
    m.burn_in = burn_in;
    m.seed = seed;

    for (int attempt = 0; attempt < 2; ++attempt) {
        m.weights.assign(static_cast<std::size_t>(grid_x) * grid_y, 0.0);
        Vec2 z = map.iterate(z0, static_cast<int>(burn_in));
        bool out_of_bounds = false;
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        const double wx = (m.hi[0] - m.lo[0]) / grid_x;
        const double wy = (m.hi[1] - m.lo[1]) / grid_y;
        for (long long i = 0; i < n; ++i) {
            z = map.eval(z);
            if (std::sqrt(z.x * z.x + z.y * z.y) > 1e6)
                throw OrbitDiverged("during histogram accumulation");
            xmin = std::min(xmin, z.x);
            xmax = std::max(xmax, z.x);
            ymin = std::min(ymin, z.y);
            ymax = std::max(ymax, z.y);
            if (z.x < m.lo[0] || z.x >= m.hi[0] || z.y < m.lo[1] || z.y >= m.hi[1]) {
                out_of_bounds = true;
                if (attempt == 1) continue;
            } else {
                const int ix = std::clamp(static_cast<int>((z.x - m.lo[0]) / wx), 0, grid_x - 1);
                const int iy = std::clamp(static_cast<int>((z.y - m.lo[1]) / wy), 0, grid_y - 1);
                m.weights[static_cast<std::size_t>(ix) * grid_y + iy] += 1.0;
            }
        }
        if (!out_of_bounds || attempt == 1) break;
        const double padx = 0.05 * std::max(xmax - xmin, 1e-12);
        const double pady = 0.05 * std::max(ymax - ymin, 1e-12);
        m.lo[0] = std::min(m.lo[0], xmin - padx);
        m.hi[0] = std::max(m.hi[0], xmax + padx);
        m.lo[1] = std::min(m.lo[1], ymin - pady);
        m.hi[1] = std::max(m.hi[1], ymax + pady);
        m.expanded = true;
    }
    const double t = m.total();
    if (t <= 0.0) throw OrbitDiverged("no orbit mass landed inside the bounds");
    for (auto& v : m.weights) v /= t;
    return m;
}

std::string measure_to_csv(const EmpiricalMeasure& m) {
    std::ostringstream os;
    os.precision(17);
    os << "cell_x,cell_y,weight\n";
    for (int ix = 0; ix < m.grid[0]; ++ix)
        for (int iy = 0; iy < m.grid[1]; ++iy) {
            const double w = m.weights[static_cast<std::size_t>(ix) * m.grid[1] + iy];
            if (w > 0.0) os << ix << "," << iy << "," << w << "\n";
        }
    return os.str();
}

} // namespace ergodic
