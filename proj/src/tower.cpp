#include "ergodic/tower.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ergodic/errors.hpp"
#include "ergodic/prng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ergodic {

int GibbsMarkovTower::branch_of(double x) const {
    for (std::size_t i = 0; i < branches.size(); ++i)
        if (branches[i].domain.contains(x)) return static_cast<int>(i);
    return -1;
}

QuotientDensity QuotientDensity::uniform(const Interval& base, int grid) {
    QuotientDensity d;
    d.base = base;
    d.grid = grid;
    d.values.assign(static_cast<std::size_t>(grid), 1.0);
    return d;
}

int QuotientDensity::cell_of(double x) const {
    int i = static_cast<int>((x - base.lo) / cell_width());
    return std::clamp(i, 0, grid - 1);
}

double QuotientDensity::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / grid;
}

double ReturnTimeStats::tail(int N) const { return weighted_tail(histogram, N); }

double weighted_tail(const std::map<int, double>& histogram, int N) {
    double t = 0.0;
    for (const auto& [j, mass] : histogram)
        if (j >= N) t += j * mass;
    return t;
}

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const AxiomCheck& c) { return c.pass; });
}

// ∫_domain g(x) rho(x) dm over the branch domain, split at grid-cell
// boundaries and evaluated at segment midpoints.
template <class G>
static double integrate_branch(const Branch& br, const QuotientDensity& rho, G&& g) {
    const double w = rho.cell_width();
    const double eps = 1e-15 * std::max(1.0, std::fabs(rho.base.hi - rho.base.lo));
    double sum = 0.0;
    double a = br.domain.lo;
    while (a < br.domain.hi) {
        int cell = std::clamp(static_cast<int>((a - rho.base.lo) / w), 0, rho.grid - 1);
        double cell_hi = rho.base.lo + (cell + 1) * w;
        while (cell_hi <= a + eps && cell < rho.grid - 1) {
            ++cell;
            cell_hi = rho.base.lo + (cell + 1) * w;
        }
        double b = std::min(br.domain.hi, cell_hi);
        if (b <= a) b = br.domain.hi;
        const double xm = 0.5 * (a + b);
        sum += g(xm) * rho.values[static_cast<std::size_t>(rho.cell_of(xm))] * (b - a);
        if (b >= br.domain.hi) break;
        a = b;
    }
    return sum / rho.base.length();
}

// Invariant mass of a branch domain under rho dm.
double branch_mass(const Branch& br, const QuotientDensity& rho) {
    return integrate_branch(br, rho, [](double) { return 1.0; });
}

ValidationReport validate_tower(const GibbsMarkovTower& tower, int samples_per_branch) {
    if (samples_per_branch < 2) throw OutOfRange("samples_per_branch must be >= 2");
    tower.budget.check();
    ValidationReport report;
    const double blen = tower.base.length();

    // P1: pairwise disjoint branch domains.
    {
        std::vector<Interval> doms;
        doms.reserve(tower.branches.size());
        for (const auto& b : tower.branches) doms.push_back(b.domain);
        std::sort(doms.begin(), doms.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        double min_gap = blen;
        for (std::size_t i = 1; i < doms.size(); ++i)
            min_gap = std::min(min_gap, doms[i].lo - doms[i - 1].hi);
        const bool ok = doms.size() < 2 || min_gap >= -1e-12 * blen;
        report.checks.push_back({"disjointness", ok, min_gap});
        if (!ok) throw OverlappingBranches("branch domains overlap by " + std::to_string(-min_gap));
    }

    // P1(b): each branch maps onto the full base.  Checked through the
    // inverse: sampled targets across the base must be reached from the
    // branch domain.
    {
        double worst = 0.0;
        for (const auto& br : tower.branches) {
            const double delta = 1e-9 * blen;
            // Evaluating a branch with expansion J in double precision can
            // miss its target by ~J*eps, so the defect tolerance scales
            // with the expansion (deep branches of exponentially expanding
            // maps hit this limit well before 1e-6).
            const double jac = br.jacobian(br.domain.mid());
            const double tol = 1e-6 * blen + 8e-15 * jac;
            double branch_worst = 0.0;
            for (int s = 0; s < samples_per_branch; ++s) {
                double y = tower.base.lo + delta +
                           (blen - 2 * delta) * s / (samples_per_branch - 1);
                const double x = br.invert(y);
                branch_worst = std::max(branch_worst, std::fabs(br.eval(x) - y));
            }
            worst = std::max(worst, branch_worst - tol + 1e-6 * blen);
        }
        const bool ok = worst <= 1e-6 * blen;
        report.checks.push_back({"markov_surjectivity", ok, worst});
        if (!ok) throw NonSurjectiveBranch("worst image defect " + std::to_string(worst));
    }

    // P1(a): branch lengths plus unassigned mass account for the base.
    {
        double total = tower.unassigned_mass;
        for (const auto& b : tower.branches) total += b.domain.length();
        const double defect = std::fabs(total - blen);
        const bool ok = defect <= 1e-12 * std::max(1.0, blen);
        report.checks.push_back({"mass_accounting", ok, defect});
        if (!ok) throw MassLeak("coverage defect " + std::to_string(defect));
    }

    // P1(c): finitely many branches per return time (records the max count).
    {
        std::map<int, int> counts;
        for (const auto& b : tower.branches) counts[b.return_time]++;
        int max_count = 0;
        for (const auto& [tau, c] : counts) max_count = std::max(max_count, c);
        report.checks.push_back({"finite_per_return_time", true, static_cast<double>(max_count)});
    }

    // Change of variables: ∫_domain JF dLeb == Leb(base) for each branch.
    {
        double worst = 0.0;
        const int nq = std::max(256, samples_per_branch);
        for (const auto& br : tower.branches) {
            const double h = br.domain.length() / nq;
            double integral = 0.0;
            for (int s = 0; s < nq; ++s)
                integral += br.jacobian(br.domain.lo + (s + 0.5) * h) * h;
            worst = std::max(worst, std::fabs(integral - blen) / blen);
        }
        report.checks.push_back({"change_of_variables", worst <= 1e-3, worst});
    }

    // P4 / Lemma-style distortion: |log(JF(x)/JF(y))| <= C0 beta^{s(Fx,Fy)}.
    {
        double worst = -1e300;
        bool ok = true;
        for (const auto& br : tower.branches) {
            const double h = br.domain.length() / samples_per_branch;
            double prev_x = br.domain.lo + 0.5 * h;
            for (int s = 1; s < samples_per_branch; ++s) {
                const double x = br.domain.lo + (s + 0.5) * h;
                const double jx = br.jacobian(x), jp = br.jacobian(prev_x);
                if (jx <= 0.0 || jp <= 0.0) throw NonpositiveJacobian("in branch distortion sampling");
                const double D = std::fabs(std::log(jx / jp));
                int sep = 0;
                try {
                    sep = separation_time(tower, br.eval(x), br.eval(prev_x), 60);
                } catch (const PointOutsideStructure&) {
                    sep = 0; // image fell in unassigned mass; use the weakest bound
                }
                const double margin = D - tower.budget.C0 * std::pow(tower.budget.beta, sep);
                worst = std::max(worst, margin);
                prev_x = x;
            }
        }
        if (worst > 1e-9) ok = false;
        if (tower.branches.empty()) worst = 0.0;
        report.checks.push_back({"distortion", ok, worst});
    }

    // log JF <= C2 * tau on every branch.
    {
        double worst = -1e300;
        for (const auto& br : tower.branches) {
            const double h = br.domain.length() / samples_per_branch;
            for (int s = 0; s < samples_per_branch; ++s) {
                const double x = br.domain.lo + (s + 0.5) * h;
                worst = std::max(worst, std::log(br.jacobian(x)) -
                                            tower.budget.C2 * br.return_time);
            }
        }
        if (tower.branches.empty()) worst = 0.0;
        report.checks.push_back({"jacobian_growth", worst <= 1e-9, worst});
    }

    return report;
}

TransferKernel::TransferKernel(const GibbsMarkovTower& tower, const Interval& base, int grid)
    : grid_(grid) {
    const double w = base.length() / grid_;
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(grid_));
    std::vector<char> inc_flags(tower.branches.size());
    for (std::size_t b = 0; b < tower.branches.size(); ++b)
        inc_flags[b] = tower.branches[b].increasing() ? 1 : 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < grid_; ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        const double y_lo = base.lo + i * w;
        const double y_hi = base.lo + (i + 1) * w;
        for (std::size_t b = 0; b < tower.branches.size(); ++b) {
            const auto& br = tower.branches[b];
            // Full branches map onto the base, so the pullbacks of the
            // base endpoints are the domain endpoints exactly; snapping
            // them avoids bisection stalling where the Jacobian vanishes
            // (dx ~ sqrt(dy) near a critical value).
            const bool inc = inc_flags[b] != 0;
            double u, v;
            if (inc) {
                u = (i == 0) ? br.domain.lo : br.invert(y_lo);
                v = (i == grid_ - 1) ? br.domain.hi : br.invert(y_hi);
            } else {
                u = (i == grid_ - 1) ? br.domain.lo : br.invert(y_hi);
                v = (i == 0) ? br.domain.hi : br.invert(y_lo);
            }
            if (u > v) std::swap(u, v);
            u = std::max(u, br.domain.lo);
            v = std::min(v, br.domain.hi);
            if (!(v > u)) continue;
            int j0 = std::clamp(static_cast<int>((u - base.lo) / w), 0, grid_ - 1);
            int j1 = std::clamp(static_cast<int>((v - base.lo) / w), 0, grid_ - 1);
            for (int j = j0; j <= j1; ++j) {
                const double lo = std::max(u, base.lo + j * w);
                const double hi = std::min(v, base.lo + (j + 1) * w);
                if (hi > lo) row.emplace_back(j, (hi - lo) / w);
            }
        }
    }
    row_ptr_.assign(static_cast<std::size_t>(grid_) + 1, 0);
    for (int i = 0; i < grid_; ++i)
        row_ptr_[static_cast<std::size_t>(i) + 1] =
            row_ptr_[static_cast<std::size_t>(i)] + rows[static_cast<std::size_t>(i)].size();
    src_.resize(row_ptr_.back());
    wgt_.resize(row_ptr_.back());
    for (int i = 0; i < grid_; ++i) {
        std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
        for (const auto& [j, g] : rows[static_cast<std::size_t>(i)]) {
            src_[k] = j;
            wgt_[k] = g;
            ++k;
        }
    }
}

void TransferKernel::apply_serial(const std::vector<double>& in, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(grid_), 0.0);
    for (int i = 0; i < grid_; ++i) {
        double acc = 0.0;
        for (std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
            acc += in[static_cast<std::size_t>(src_[k])] * wgt_[k];
        out[static_cast<std::size_t>(i)] = acc;
    }
}

void TransferKernel::apply_parallel(const std::vector<double>& in, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(grid_), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < grid_; ++i) {
        double acc = 0.0;
        for (std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
            acc += in[static_cast<std::size_t>(src_[k])] * wgt_[k];
        out[static_cast<std::size_t>(i)] = acc;
    }
}

QuotientDensity transfer_step(const GibbsMarkovTower& tower, const QuotientDensity& density) {
    if (std::fabs(density.base.lo - tower.base.lo) > 1e-12 ||
        std::fabs(density.base.hi - tower.base.hi) > 1e-12)
        throw GridMismatch("density grid does not live on the tower base");
    TransferKernel kernel(tower, tower.base, density.grid);
    QuotientDensity out = density;
    kernel.apply_parallel(density.values, out.values);
    return out;
}

QuotientDensity solve_invariant_density(const GibbsMarkovTower& tower, int grid,
                                        const SolveOptions& opts) {
    if (opts.tol <= 0.0) throw OutOfRange("tol must be positive");
    int over = opts.oversample;
    if (over < 0) throw OutOfRange("oversample must be >= 0");
    if (over == 0) {
        over = 1;
        const bool affine = std::all_of(
            tower.branches.begin(), tower.branches.end(),
            [](const Branch& b) { return b.map.kind == BranchMap::Kind::Affine; });
        if (!affine)
            while (grid * over < (1 << 18) && over < 256) over *= 2;
    }
    const int fine = grid * over;
    TransferKernel kernel(tower, tower.base, fine);
    QuotientDensity rho = QuotientDensity::uniform(tower.base, fine);
    std::vector<double> cur = rho.values, next(rho.values.size());
    std::vector<double> accum(rho.values.size(), 0.0), prev_avg = cur;
    double residual = 1.0;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        kernel.apply_parallel(cur, next);
        double mass = std::accumulate(next.begin(), next.end(), 0.0) / fine;
        if (mass <= 0.0) throw NoConvergence("transfer image lost all mass");
        for (auto& v : next) v /= mass;
        if (opts.cesaro) {
            for (std::size_t i = 0; i < next.size(); ++i) accum[i] += next[i];
            residual = 0.0;
            for (std::size_t i = 0; i < next.size(); ++i) {
                const double avg = accum[i] / (iter + 1);
                residual += std::fabs(avg - prev_avg[i]);
                prev_avg[i] = avg;
            }
            residual /= fine;
        } else {
            residual = 0.0;
            for (std::size_t i = 0; i < next.size(); ++i)
                residual += std::fabs(next[i] - cur[i]);
            residual /= fine;
        }
        cur.swap(next);
        if (residual <= opts.tol) break;
    }
    if (residual > opts.tol)
        throw NoConvergence("residual " + std::to_string(residual) + " after " +
                            std::to_string(opts.max_iter) + " iterations");
    const std::vector<double>& solved = opts.cesaro ? prev_avg : cur;
    rho.grid = grid;
    rho.values.assign(static_cast<std::size_t>(grid), 0.0);
    for (int i = 0; i < fine; ++i)
        rho.values[static_cast<std::size_t>(i / over)] += solved[static_cast<std::size_t>(i)] / over;
    const double mass = rho.integral();
    for (auto& v : rho.values) v /= mass;
    rho.residual = residual;
    rho.iterations = iter + 1;
    if (opts.check_bounds) {
        const double K = tower.budget.K();
        const double lo = 1.0 / K - opts.tol, hi = K + opts.tol;
        for (double v : rho.values)
            if (v < lo || v > hi)
                throw BoundViolation("density value " + std::to_string(v) +
                                     " escapes [1/K, K] with K = " + std::to_string(K));
    }
    return rho;
}

ReturnTimeStats return_time_stats(const GibbsMarkovTower& tower, const QuotientDensity& density) {
    ReturnTimeStats stats;
    for (const auto& br : tower.branches) {
        const double m = branch_mass(br, density);
        stats.histogram[br.return_time] += m;
        stats.sigma += br.return_time * m;
    }
    stats.truncated_mass = tower.rel(tower.unassigned_mass);
    return stats;
}

double entropy(const GibbsMarkovTower& tower, const QuotientDensity& density,
               const EntropyOptions& opts) {
    QuotientDensity weight = density;
    if (opts.against_reference)
        weight.values.assign(weight.values.size(), 1.0);
    double sigma = 0.0, integral = 0.0;
    for (const auto& br : tower.branches) {
        sigma += br.return_time * branch_mass(br, density);
        integral += integrate_branch(br, weight, [&br](double x) {
            const double j = br.jacobian(x);
            if (j <= 0.0) throw NonpositiveJacobian("log JF undefined");
            return std::log(j);
        });
    }
    if (sigma <= 0.0) throw OutOfRange("sigma must be positive");
    return integral / sigma;
}

int separation_time(const GibbsMarkovTower& tower, double x, double y, int cap) {
    for (int n = 0; n < cap; ++n) {
        const int ix = tower.branch_of(x);
        const int iy = tower.branch_of(y);
        if (ix < 0 || iy < 0) throw PointOutsideStructure("orbit left the branch family");
        if (ix != iy) return n;
        x = tower.branches[static_cast<std::size_t>(ix)].eval(x);
        y = tower.branches[static_cast<std::size_t>(iy)].eval(y);
    }
    return cap;
}

std::vector<int> consecutive_returns(const GibbsMarkovTower& tower, double x, int k) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
        const int i = tower.branch_of(x);
        if (i < 0) throw OrbitEscapesStructure("after " + std::to_string(t) + " induced steps");
        const auto& br = tower.branches[static_cast<std::size_t>(i)];
        out.push_back(br.return_time);
        x = br.eval(x);
    }
    return out;
}

BoundReport deep_return_bound_check(const GibbsMarkovTower& tower, const QuotientDensity&,
                                    int k, int N, int n_samples, std::uint64_t seed) {
    if (k < 1 || N < 1) throw OutOfRange("k and N must be >= 1");
    Xoshiro256pp rng(seed);
    long hits = 0;
    for (int s = 0; s < n_samples; ++s) {
        double x = rng.uniform(tower.base.lo, tower.base.hi);
        bool deep = false;
        for (int t = 0; t < k; ++t) {
            const int i = tower.branch_of(x);
            if (i < 0) { deep = true; break; } // unassigned mass counts against us
            const auto& br = tower.branches[static_cast<std::size_t>(i)];
            if (br.return_time > N) { deep = true; break; }
            x = br.eval(x);
        }
        if (deep) ++hits;
    }
    BoundReport rep;
    rep.estimate = static_cast<double>(hits) / n_samples;
    rep.std_error = std::sqrt(std::max(rep.estimate * (1.0 - rep.estimate), 1e-12) / n_samples);
    double deep_mass = tower.rel(tower.unassigned_mass);
    for (const auto& br : tower.branches)
        if (br.return_time > N) deep_mass += tower.rel(br.domain.length());
    rep.bound = k * tower.budget.C1 * deep_mass;
    rep.pass = rep.estimate <= rep.bound + 3.0 * rep.std_error + 1e-12;
    return rep;
}

std::vector<double> saturation_profile(const GibbsMarkovTower& tower,
                                       const QuotientDensity& density, int L) {
    if (L < 1) throw OutOfRange("L must be >= 1");
    std::vector<double> masses; // invariant mass per branch
    masses.reserve(tower.branches.size());
    for (const auto& br : tower.branches) masses.push_back(branch_mass(br, density));
    std::vector<double> profile(static_cast<std::size_t>(L), 0.0);
    for (std::size_t i = 0; i < tower.branches.size(); ++i)
        for (int l = 0; l < L && l < tower.branches[i].return_time; ++l)
            profile[static_cast<std::size_t>(l)] += masses[i];
    return profile;
}

DistortionBudget fit_budget(const GibbsMarkovTower& tower, double beta, int samples_per_branch) {
    DistortionBudget b;
    b.beta = beta;
    b.fitted = true;
    double max_ratio_log = 0.0, max_c0 = 0.0, max_growth = 0.0;
    for (const auto& br : tower.branches) {
        const double h = br.domain.length() / samples_per_branch;
        double prev = br.domain.lo + 0.5 * h;
        for (int s = 0; s < samples_per_branch; ++s) {
            const double x = br.domain.lo + (s + 0.5) * h;
            const double jx = br.jacobian(x);
            if (jx <= 0.0) throw NonpositiveJacobian("while fitting budget");
            max_growth = std::max(max_growth, std::log(jx) / br.return_time);
            if (s > 0) {
                const double D = std::fabs(std::log(jx / br.jacobian(prev)));
                max_ratio_log = std::max(max_ratio_log, D);
                int sep = 0;
                try {
                    sep = separation_time(tower, br.eval(x), br.eval(prev), 40);
                } catch (const PointOutsideStructure&) {
                    sep = 0;
                }
                max_c0 = std::max(max_c0, D / std::pow(beta, sep));
            }
            prev = x;
        }
    }
    b.C0 = max_c0;
    b.C = max_c0;
    b.C1 = std::max(1.0, std::exp(std::min(max_ratio_log, 600.0)));
    b.C2 = std::max(2.0 * b.C, max_growth);
    return b;
}

GibbsMarkovTower doubling_tower() {
    GibbsMarkovTower t;
    t.name = "doubling";
    t.base = {0.0, 1.0};
    t.R_max = 1;
    Branch left{{0.0, 0.5}, 1, BranchMap::affine(2.0, 0.0)};
    Branch right{{0.5, 1.0}, 1, BranchMap::affine(2.0, -1.0)};
    t.branches = {left, right};
    t.budget = {0.0, 0.5, 0.0, 1.0, std::log(2.0), false};
    t.source_map = Map1D::doubling();
    return t;
}

GibbsMarkovTower bernoulli_tower(const std::vector<double>& masses, const std::vector<int>& taus) {
    if (masses.size() != taus.size() || masses.empty())
        throw OutOfRange("mass and return-time lists must match and be nonempty");
    GibbsMarkovTower t;
    t.name = "bernoulli";
    t.base = {0.0, 1.0};
    double c = 0.0, c2 = 0.0;
    int rmax = 1;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double p = masses[i];
        if (!(p > 0.0 && p < 1.0)) throw OutOfRange("branch masses must lie in (0,1)");
        Branch br{{c, c + p}, taus[i], BranchMap::affine(1.0 / p, -c / p)};
        t.branches.push_back(br);
        c2 = std::max(c2, std::log(1.0 / p) / taus[i]);
        rmax = std::max(rmax, taus[i]);
        c += p;
    }
    if (std::fabs(c - 1.0) > 1e-12) throw MassLeak("branch masses must sum to 1");
    t.R_max = rmax;
    t.budget = {0.0, 0.5, 0.0, 1.0, c2, false};
    return t;
}

GibbsMarkovTower ulam_tower() {
    GibbsMarkovTower t;
    t.name = "ulam";
    t.base = {0.0, 1.0};
    t.R_max = 1;
    const Map1D log_map = Map1D::logistic();
    Branch left{{0.0, 0.5}, 1, BranchMap::iterated(log_map, 1)};
    Branch right{{0.5, 1.0}, 1, BranchMap::iterated(log_map, 1)};
    t.branches = {left, right};
    t.source_map = log_map;
    t.budget = fit_budget(t, 0.5, 64);
    return t;
}

} // namespace ergodic
