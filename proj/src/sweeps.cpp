#include "ergodic/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ergodic/empirical.hpp"
#include "ergodic/errors.hpp"
#include "ergodic/estimators.hpp"
#include "ergodic/henon.hpp"
#include "ergodic/prng.hpp"
#include "ergodic/wasserstein.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ergodic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GibbsMarkovTower bernoulli_theta_tower(double theta) {
    return bernoulli_tower({theta, 1.0 - theta}, {1, 2});
}

EmpiricalMeasure density_as_measure(const QuotientDensity& rho) {
    EmpiricalMeasure m;
    m.dims = 1;
    m.grid[0] = rho.grid;
    m.grid[1] = 1;
    m.lo[0] = rho.base.lo;
    m.hi[0] = rho.base.hi;
    m.weights.resize(static_cast<std::size_t>(rho.grid));
    double total = 0.0;
    for (int i = 0; i < rho.grid; ++i) total += rho.values[static_cast<std::size_t>(i)];
    for (int i = 0; i < rho.grid; ++i)
        m.weights[static_cast<std::size_t>(i)] = rho.values[static_cast<std::size_t>(i)] / total;
    return m;
}

DeltaSummary summarize(std::vector<double> vals) {
    DeltaSummary s;
    s.n_ok = static_cast<int>(vals.size());
    if (vals.empty()) return s;
    std::sort(vals.begin(), vals.end());
    auto q = [&](double p) {
        const double idx = p * (vals.size() - 1);
        const std::size_t i = static_cast<std::size_t>(idx);
        const double frac = idx - i;
        return i + 1 < vals.size() ? vals[i] * (1.0 - frac) + vals[i + 1] * frac : vals[i];
    };
    s.median = q(0.5);
    s.iqr = q(0.75) - q(0.25);
    return s;
}

} // namespace

void SweepSpec::validate() const {
    if (family != "henon-a" && family != "tent-slope" && family != "bernoulli-theta")
        throw OutOfRange("unknown sweep family: " + family);
    if (seeds.empty()) throw OutOfRange("seeds must be nonempty");
    if (std::none_of(deltas.begin(), deltas.end(), [](double d) { return d == 0.0; }))
        throw OutOfRange("deltas must include 0");
    if (n < 1000) throw OutOfRange("n must be >= 1000");
    if (grid < 8) throw OutOfRange("grid must be >= 8");
    if (n_directions < 4) throw OutOfRange("n_directions must be >= 4");
}

StabilityReport stability_sweep(const SweepSpec& spec) {
    spec.validate();
    StabilityReport report;
    report.family = spec.family;
    report.base_param = spec.base_param;

    const int n_seeds = static_cast<int>(spec.seeds.size());
    const int n_deltas = static_cast<int>(spec.deltas.size());

    if (spec.family == "henon-a") {
        const double b = spec.secondary;
        // Henon attractor bounding box for parameters near (1.4, 0.3).
        const double xlo = -1.9, xhi = 1.9, ylo = -0.6, yhi = 0.6;
        auto measure_at = [&](double a, std::uint64_t seed) {
            Xoshiro256pp rng(derive_stream_seed(seed, 0x78306865ULL));
            const Vec2 z0{0.1 * rng.uniform() - 0.05, 0.1 * rng.uniform() - 0.05};
            HenonMap map{a, b};
            return empirical_measure_2d(map, z0, spec.burn_in, spec.n, spec.grid, spec.grid,
                                        xlo, xhi, ylo, yhi, seed);
        };
        std::vector<EmpiricalMeasure> base(static_cast<std::size_t>(n_seeds));
        std::vector<std::string> base_status(static_cast<std::size_t>(n_seeds), "ok");
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int s = 0; s < n_seeds; ++s) {
            try {
                base[static_cast<std::size_t>(s)] =
                    measure_at(spec.base_param, spec.seeds[static_cast<std::size_t>(s)]);
            } catch (const Error& e) {
                base_status[static_cast<std::size_t>(s)] = e.what();
            }
        }
        report.rows.assign(static_cast<std::size_t>(n_seeds) * n_deltas, {});
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) collapse(2)
#endif
        for (int d = 0; d < n_deltas; ++d)
            for (int s = 0; s < n_seeds; ++s) {
                StabilityRow row;
                row.delta = spec.deltas[static_cast<std::size_t>(d)];
                row.seed = spec.seeds[static_cast<std::size_t>(s)];
                row.n = spec.n;
                row.entropy = kNaN;
                try {
                    if (base_status[static_cast<std::size_t>(s)] != "ok")
                        throw OrbitDiverged("base measure failed");
                    const auto pert = measure_at(spec.base_param + row.delta, row.seed);
                    row.distance =
                        sliced_w1(pert, base[static_cast<std::size_t>(s)], spec.n_directions);
                    const auto ly = lyapunov_spectrum(HenonMap{spec.base_param + row.delta, b},
                                                      Vec2{0.0, 0.0}, std::max<long long>(spec.n, 10000),
                                                      10, row.seed);
                    row.lambda1 = ly.lambda1;
                } catch (const Error& e) {
                    row.status = e.what();
                    row.distance = kNaN;
                    row.lambda1 = kNaN;
                }
                report.rows[static_cast<std::size_t>(d) * n_seeds + s] = row;
            }
    } else if (spec.family == "tent-slope") {
        auto measure_at = [&](double slope, std::uint64_t seed) {
            Xoshiro256pp rng(derive_stream_seed(seed, 0x74656e74ULL));
            const double x0 = rng.uniform(0.1, 0.9);
            return empirical_measure_1d(Map1D::tent(slope), x0, spec.burn_in, spec.n, spec.grid,
                                        0.0, 1.0, seed);
        };
        report.rows.assign(static_cast<std::size_t>(n_seeds) * n_deltas, {});
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) collapse(2)
#endif
        for (int d = 0; d < n_deltas; ++d)
            for (int s = 0; s < n_seeds; ++s) {
                StabilityRow row;
                row.delta = spec.deltas[static_cast<std::size_t>(d)];
                row.seed = spec.seeds[static_cast<std::size_t>(s)];
                row.n = spec.n;
                row.entropy = kNaN;
                try {
                    const auto base_m = measure_at(spec.base_param, row.seed);
                    const auto pert = measure_at(spec.base_param + row.delta, row.seed);
                    row.distance = w1_distance_1d(pert, base_m);
                    row.lambda1 = std::log(spec.base_param + row.delta);
                } catch (const Error& e) {
                    row.status = e.what();
                    row.distance = kNaN;
                    row.lambda1 = kNaN;
                }
                report.rows[static_cast<std::size_t>(d) * n_seeds + s] = row;
            }
    } else { // bernoulli-theta
        auto density_at = [&](double theta) {
            const auto tower = bernoulli_theta_tower(theta);
            return solve_invariant_density(tower, spec.grid);
        };
        report.rows.assign(static_cast<std::size_t>(n_seeds) * n_deltas, {});
        for (int d = 0; d < n_deltas; ++d)
            for (int s = 0; s < n_seeds; ++s) {
                StabilityRow row;
                row.delta = spec.deltas[static_cast<std::size_t>(d)];
                row.seed = spec.seeds[static_cast<std::size_t>(s)];
                row.n = spec.n;
                row.lambda1 = kNaN;
                try {
                    const double theta = spec.base_param + row.delta;
                    const auto tower = bernoulli_theta_tower(theta);
                    const auto rho = solve_invariant_density(tower, spec.grid);
                    row.distance = w1_distance_1d(density_as_measure(rho),
                                                  density_as_measure(density_at(spec.base_param)));
                    row.entropy = entropy(tower, rho);
                } catch (const Error& e) {
                    row.status = e.what();
                    row.distance = kNaN;
                    row.entropy = kNaN;
                }
                report.rows[static_cast<std::size_t>(d) * n_seeds + s] = row;
            }
    }

    for (double delta : spec.deltas) {
        std::vector<double> vals;
        for (const auto& row : report.rows)
            if (row.delta == delta && row.status == "ok" && std::isfinite(row.distance))
                vals.push_back(row.distance);
        report.summary[delta] = summarize(std::move(vals));
    }
    return report;
}

std::string StabilityReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "family,param_base,delta,seed,n,distance,entropy,lambda1,status\n";
    for (const auto& r : rows)
        os << family << "," << base_param << "," << r.delta << "," << r.seed << "," << r.n << ","
           << r.distance << "," << r.entropy << "," << r.lambda1 << "," << r.status << "\n";
    return os.str();
}

EntropyContinuityReport entropy_continuity_sweep(const std::string& family,
                                                 const std::vector<double>& thetas, int grid,
                                                 long long n, std::uint64_t seed) {
    if (family != "bernoulli" && family != "tent")
        throw OutOfRange("unknown entropy family: " + family);
    EntropyContinuityReport report;
    report.family = family;
    report.rows.assign(thetas.size(), {});

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < static_cast<int>(thetas.size()); ++i) {
        EntropyRow row;
        row.theta = thetas[static_cast<std::size_t>(i)];
        try {
            if (family == "bernoulli") {
                const auto tower = bernoulli_theta_tower(row.theta);
                const auto rho = solve_invariant_density(tower, grid);
                row.h = entropy(tower, rho);
            } else {
                const auto obs = Observable::parse("logderiv");
                row.h = birkhoff_average(Map1D::tent(row.theta), obs, 0.37, 1000, n,
                                         derive_stream_seed(seed, static_cast<std::uint64_t>(i)));
            }
        } catch (const Error& e) {
            row.status = e.what();
            row.h = kNaN;
        }
        report.rows[static_cast<std::size_t>(i)] = row;
    }

    // Modulus of continuity over the sampled grid.
    std::vector<double> gaps;
    for (std::size_t i = 0; i < thetas.size(); ++i)
        for (std::size_t j = i + 1; j < thetas.size(); ++j)
            gaps.push_back(std::fabs(thetas[j] - thetas[i]));
    std::sort(gaps.begin(), gaps.end());
    gaps.erase(std::unique(gaps.begin(), gaps.end(),
                           [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
               gaps.end());
    for (double delta : gaps) {
        double mod = 0.0;
        for (std::size_t i = 0; i < thetas.size(); ++i)
            for (std::size_t j = i + 1; j < thetas.size(); ++j)
                if (std::fabs(thetas[j] - thetas[i]) <= delta + 1e-12 &&
                    report.rows[i].status == "ok" && report.rows[j].status == "ok")
                    mod = std::max(mod, std::fabs(report.rows[j].h - report.rows[i].h));
        report.modulus.push_back({delta, mod});
    }
    return report;
}

std::string EntropyContinuityReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "family,theta,h,status\n";
    for (const auto& r : rows)
        os << family << "," << r.theta << "," << r.h << "," << r.status << "\n";
    return os.str();
}

namespace {

// Total length of the intersection of two sorted disjoint interval lists.
double intersection_length(const std::vector<Interval>& a, const std::vector<Interval>& b) {
    double len = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double lo = std::max(a[i].lo, b[j].lo);
        const double hi = std::min(a[i].hi, b[j].hi);
        if (hi > lo) len += hi - lo;
        if (a[i].hi < b[j].hi)
            ++i;
        else
            ++j;
    }
    return len;
}

std::vector<Interval> sorted_domains(const GibbsMarkovTower& t,
                                     int tau_filter /* -1 for all */) {
    std::vector<Interval> out;
    for (const auto& br : t.branches)
        if (tau_filter < 0 || br.return_time == tau_filter) out.push_back(br.domain);
    std::sort(out.begin(), out.end(),
              [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    return out;
}

double sym_diff_mass(const GibbsMarkovTower& a, const GibbsMarkovTower& b, int tau_filter) {
    const auto da = sorted_domains(a, tau_filter);
    const auto db = sorted_domains(b, tau_filter);
    double la = 0.0, lb = 0.0;
    for (const auto& iv : da) la += iv.length();
    for (const auto& iv : db) lb += iv.length();
    return (la + lb - 2.0 * intersection_length(da, db)) /
           std::max(a.base.length(), b.base.length());
}

// Depth-k cylinders keyed by their return-time word; interval unions per word.
void collect_cylinders(const GibbsMarkovTower& t, int depth, int N, const Interval& range,
                       std::vector<int>& word, int level,
                       std::map<std::vector<int>, std::vector<Interval>>& out) {
    if (level == depth) {
        out[word].push_back(range);
        return;
    }
    for (const auto& br : t.branches) {
        if (br.return_time > N) continue;
        Interval dom = level == 0 ? br.domain : Interval{br.invert(range.lo), br.invert(range.hi)};
        if (level > 0) {
            if (dom.lo > dom.hi) std::swap(dom.lo, dom.hi);
            dom = intersect(dom, br.domain);
            if (dom.empty(1e-15)) continue;
        }
        word.push_back(br.return_time);
        collect_cylinders(t, depth, N, dom, word, level + 1, out);
        word.pop_back();
    }
}

} // namespace

UniformityDiagnostics uniformity_diagnostics(const GibbsMarkovTower& tower_n,
                                             const GibbsMarkovTower& tower_0, int N,
                                             int depth) {
    // Bases may differ by a small perturbation (that difference is part of
    // what the diagnostics measure), but they must overlap.
    if (std::min(tower_n.base.hi, tower_0.base.hi) <=
        std::max(tower_n.base.lo, tower_0.base.lo))
        throw BaseMismatch("tower bases do not overlap");
    UniformityDiagnostics diag;
    diag.sym_diff_base_mass = sym_diff_mass(tower_n, tower_0, -1);
    for (int j = 1; j <= N; ++j)
        diag.per_time_sym_diff[j] = sym_diff_mass(tower_n, tower_0, j);

    // U5 tails against the reference measure: the histogram and tail come
    // from the same code path as return_time_stats with a uniform density,
    // so the two agree bit-for-bit.
    auto m_histogram = [](const GibbsMarkovTower& t) {
        return return_time_stats(t, QuotientDensity::uniform(t.base, 64)).histogram;
    };
    diag.tail_n = weighted_tail(m_histogram(tower_n), N);
    diag.tail_0 = weighted_tail(m_histogram(tower_0), N);

    if (depth > 1) {
        std::map<std::vector<int>, std::vector<Interval>> cyl_n, cyl_0;
        std::vector<int> word;
        collect_cylinders(tower_n, depth, N, tower_n.base, word, 0, cyl_n);
        collect_cylinders(tower_0, depth, N, tower_0.base, word, 0, cyl_0);
        double total = 0.0;
        std::map<std::vector<int>, std::pair<double, double>> lengths;
        auto accumulate = [](const std::vector<Interval>& ivs) {
            double s = 0.0;
            for (const auto& iv : ivs) s += iv.length();
            return s;
        };
        for (auto& [w, ivs] : cyl_n) {
            std::sort(ivs.begin(), ivs.end(),
                      [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
            lengths[w].first = accumulate(ivs);
        }
        for (auto& [w, ivs] : cyl_0) {
            std::sort(ivs.begin(), ivs.end(),
                      [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
            lengths[w].second = accumulate(ivs);
        }
        for (const auto& [w, lens] : lengths) {
            const auto it_n = cyl_n.find(w);
            const auto it_0 = cyl_0.find(w);
            const double inter =
                (it_n != cyl_n.end() && it_0 != cyl_0.end())
                    ? intersection_length(it_n->second, it_0->second)
                    : 0.0;
            total += lens.first + lens.second - 2.0 * inter;
        }
        diag.deep_sym_diff = total / tower_n.base.length();
    }
    return diag;
}

} // namespace ergodic
