#include "ergodic/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "ergodic/errors.hpp"

namespace ergodic {

double birkhoff_average(const Map1D& map, const Observable& phi, double x0, long long burn_in,
                        long long n, std::uint64_t seed) {
    if (n < 1) throw OutOfRange("n must be >= 1");
    OrbitSampler sampler(map, x0, seed);
    for (long long i = 0; i < burn_in; ++i) sampler.step();
    double sum = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double x = sampler.step();
        sum += phi.eval(x, 0.0, &map);
    }
    return sum / static_cast<double>(n);
}

LyapunovEstimate lyapunov_spectrum(const HenonMap& map, const Vec2& z0, long long n,
                                   int renorm_every, std::uint64_t seed) {
    if (n < 10000) throw OutOfRange("n must be >= 1e4");
    if (renorm_every < 1) throw OutOfRange("renorm_every must be >= 1");
    LyapunovEstimate est;
    est.dims = 2;
    est.n = n;
    est.renorm_every = renorm_every;
    est.seed = seed;

    Vec2 z = map.iterate(z0, 1000); // settle onto the attractor
    Vec2 u{1.0, 0.0}, v{0.0, 1.0};
    double acc1 = 0.0, acc2 = 0.0;
    const int n_blocks = 10;
    const long long block = n / n_blocks;
    double block1[10] = {0}, block2[10] = {0};
    long long steps_since = 0;
    for (long long i = 0; i < n; ++i) {
        const Mat2 d = map.deriv(z);
        u = d.apply(u);
        v = d.apply(v);
        z = map.eval(z);
        if (std::sqrt(z.x * z.x + z.y * z.y) > 1e6)
            throw OrbitDiverged("during tangent iteration");
        if (++steps_since == renorm_every || i + 1 == n) {
            const double r1 = std::sqrt(u.x * u.x + u.y * u.y);
            if (r1 < 1e-300) throw DegenerateTangent("decrease renorm_every");
            u.x /= r1;
            u.y /= r1;
            const double proj = u.x * v.x + u.y * v.y;
            v.x -= proj * u.x;
            v.y -= proj * u.y;
            const double r2 = std::sqrt(v.x * v.x + v.y * v.y);
            if (r2 < 1e-300) throw DegenerateTangent("decrease renorm_every");
            v.x /= r2;
            v.y /= r2;
            acc1 += std::log(r1);
            acc2 += std::log(r2);
            const int bi = static_cast<int>(std::min<long long>(i / std::max<long long>(block, 1),
                                                                n_blocks - 1));
            block1[bi] += std::log(r1);
            block2[bi] += std::log(r2);
            steps_since = 0;
        }
    }
    est.lambda1 = acc1 / static_cast<double>(n);
    est.lambda2 = acc2 / static_cast<double>(n);
    double bmin = 1e300, bmax = -1e300;
    for (int b = 0; b < n_blocks; ++b) {
        const double rate = block1[b] / static_cast<double>(block);
        bmin = std::min(bmin, rate);
        bmax = std::max(bmax, rate);
    }
    est.ci_halfwidth = 0.5 * (bmax - bmin);
    return est;
}

LyapunovEstimate lyapunov_spectrum(const Map1D& map, double x0, long long n,
                                   std::uint64_t seed) {
    if (n < 10000) throw OutOfRange("n must be >= 1e4");
    LyapunovEstimate est;
    est.dims = 1;
    est.n = n;
    est.seed = seed;
    OrbitSampler sampler(map, x0, seed);
    for (int i = 0; i < 1000; ++i) sampler.step();
    const int n_blocks = 10;
    const long long block = std::max<long long>(n / n_blocks, 1);
    double blocks[10] = {0};
    double acc = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double x = sampler.current();
        const double g = std::log(std::fabs(map.deriv(x)));
        acc += g;
        blocks[std::min<long long>(i / block, n_blocks - 1)] += g;
        sampler.step();
    }
    est.lambda1 = acc / static_cast<double>(n);
    est.lambda2 = 0.0;
    double bmin = 1e300, bmax = -1e300;
    for (int b = 0; b < n_blocks; ++b) {
        const double rate = blocks[b] / static_cast<double>(block);
        bmin = std::min(bmin, rate);
        bmax = std::max(bmax, rate);
    }
    est.ci_halfwidth = 0.5 * (bmax - bmin);
    return est;
}

static void require_same_map(const GibbsMarkovTower& tower, const Map1D& map) {
    if (!tower.source_map || tower.source_map->kind() != map.kind() ||
        std::fabs(tower.source_map->param() - map.param()) > 1e-12)
        throw TowerMapMismatch("tower branches are not iterates of the given map");
}

SaturationResult saturate_measure(const GibbsMarkovTower& tower, const QuotientDensity& density,
                                  const Map1D& map, int grid) {
    require_same_map(tower, map);
    SaturationResult result;
    EmpiricalMeasure& m = result.measure;
    m.dims = 1;
    m.grid[0] = grid;
    m.grid[1] = 1;
    m.lo[0] = map.domain().lo;
    m.hi[0] = map.domain().hi;
    m.weights.assign(static_cast<std::size_t>(grid), 0.0);
    const double out_w = (m.hi[0] - m.lo[0]) / grid;
    const double base_len = tower.base.length();
    const double cell_w = density.cell_width();

    for (const auto& br : tower.branches) {
        for (int level = 0; level < br.return_time; ++level) {
            // Transport rho restricted to the branch by f^level.
            double a = br.domain.lo;
            while (a < br.domain.hi) {
                int cell = std::clamp(static_cast<int>((a - density.base.lo) / cell_w), 0,
                                      density.grid - 1);
                double cell_hi = density.base.lo + (cell + 1) * cell_w;
                while (cell_hi <= a && cell < density.grid - 1) {
                    ++cell;
                    cell_hi = density.base.lo + (cell + 1) * cell_w;
                }
                double b = std::min(br.domain.hi, cell_hi);
                if (b <= a) b = br.domain.hi;
                // Subdivide so the image of each sub-segment resolves on
                // the output grid.
                double stretch = 1.0;
                {
                    double x = 0.5 * (a + b);
                    for (int j = 0; j < level; ++j) {
                        stretch *= std::fabs(map.deriv(x));
                        x = map.eval(x);
                    }
                }
                const int n_sub = std::clamp(
                    static_cast<int>(std::ceil(stretch * (b - a) / out_w)), 1, 1 << 14);
                const double rho = density.values[static_cast<std::size_t>(density.cell_of(
                    0.5 * (a + b)))];
                const double sub_mass = rho * (b - a) / (base_len * n_sub);
                for (int s = 0; s < n_sub; ++s) {
                    const double xm = a + (s + 0.5) * (b - a) / n_sub;
                    const double y = map.iterate(xm, level);
                    const int ix = std::clamp(static_cast<int>((y - m.lo[0]) / out_w), 0, grid - 1);
                    m.weights[static_cast<std::size_t>(ix)] += sub_mass;
                }
                if (b >= br.domain.hi) break;
                a = b;
            }
        }
    }
    result.mass = m.total();
    if (result.mass <= 0.0) throw TowerMapMismatch("saturation produced no mass");
    for (auto& w : m.weights) w /= result.mass;
    return result;
}

RelationReport induced_lyapunov_check(const GibbsMarkovTower& tower,
                                      const QuotientDensity& density, const Map1D& map,
                                      double x0, long long n, std::uint64_t seed) {
    require_same_map(tower, map);
    RelationReport rep;
    rep.sigma = return_time_stats(tower, density).sigma;

    OrbitSampler sampler(map, x0, seed);
    const long long cap = 1000 * n + 1000000;
    long long steps = 0;
    // Walk to the first base entry.
    double x = sampler.current();
    while (!tower.base.contains(x)) {
        x = sampler.step();
        if (++steps > cap) throw OrbitEscapesStructure("orbit never entered the base");
    }
    double log_sum = 0.0;
    long long induced_done = 0, f_steps = 0;
    while (induced_done < n) {
        // One induced step: iterate f until the orbit re-enters the base.
        do {
            log_sum += std::log(std::fabs(map.deriv(x)));
            x = sampler.step();
            ++f_steps;
            if (f_steps > cap) throw OrbitEscapesStructure("excursion exceeded the step cap");
        } while (!tower.base.contains(x));
        ++induced_done;
    }
    rep.lambda_induced = log_sum / static_cast<double>(n);
    rep.lambda_map = log_sum / static_cast<double>(f_steps);
    rep.defect = std::fabs(rep.lambda_induced - rep.sigma * rep.lambda_map);
    return rep;
}

double pesin_defect(const Map1D& map, const GibbsMarkovTower& tower,
                    const QuotientDensity& density, double x0, long long n,
                    std::uint64_t seed) {
    const double h = entropy(tower, density);
    const LyapunovEstimate est = lyapunov_spectrum(map, x0, n, seed);
    return std::fabs(h - est.lambda1);
}

} // namespace ergodic
