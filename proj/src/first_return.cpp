#include "ergodic/first_return.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "ergodic/errors.hpp"

namespace ergodic {

namespace {

// Piece of the base on which f^k is monotone, with tracked image.
// Image endpoints correspond to domain endpoints: f^k(a) = ia, f^k(b) = ib.
struct Cand {
    double a, b;   // subinterval of the base
    double ia, ib; // image endpoints under f^k (oriented)
    int k;
};

// Preimage of image-value y within [a, b] under f^k (monotone there).
double pull_back(const Map1D& map, const Cand& c, double y) {
    const bool inc = c.ib > c.ia;
    double lo = c.a, hi = c.b;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fy = map.iterate(mid, c.k);
        if ((fy < y) == inc)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

GibbsMarkovTower first_return_tower(const Map1D& map, const Interval& base, int R_max,
                                    double min_branch_len) {
    if (R_max < 1) throw OutOfRange("R_max must be >= 1");
    GibbsMarkovTower tower;
    tower.base = base;
    tower.R_max = R_max;
    tower.source_map = map;
    tower.name = map.name() + "-first-return";
    const double blen = base.length();

    std::deque<Cand> queue;
    for (int l = 0; l < map.lap_count(); ++l) {
        const Interval dom = intersect(map.lap(l), base);
        if (dom.empty(1e-15)) continue;
        queue.push_back({dom.lo, dom.hi, map.eval_lap(l, dom.lo), map.eval_lap(l, dom.hi), 1});
    }

    auto drop = [&](double len) { tower.unassigned_mass += std::max(0.0, len); };

    // Apply f once to a monotone piece [xa,xb] with f^k image (ya, yb):
    // split the image at the map's breakpoints and queue the monotone
    // sub-pieces with step count k+1.
    auto continue_piece = [&](double xa, double xb, double ya, double yb, int k) {
        if (xb - xa <= 0.0) return;
        if (k + 1 > R_max || xb - xa < min_branch_len) {
            drop(xb - xa);
            return;
        }
        const bool inc = yb > ya;
        const double ilo = std::min(ya, yb), ihi = std::max(ya, yb);
        std::vector<double> cuts = {ilo};
        for (double bp : map.breakpoints())
            if (bp > ilo + 1e-15 && bp < ihi - 1e-15) cuts.push_back(bp);
        cuts.push_back(ihi);
        std::sort(cuts.begin(), cuts.end());

        const Cand span{xa, xb, ya, yb, k};
        std::vector<double> xcuts(cuts.size());
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            if (i == 0)
                xcuts[i] = inc ? xa : xb;
            else if (i + 1 == cuts.size())
                xcuts[i] = inc ? xb : xa;
            else
                xcuts[i] = pull_back(map, span, cuts[i]);
        }
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double u = cuts[i], v = cuts[i + 1];
            const double na = std::min(xcuts[i], xcuts[i + 1]);
            const double nb = std::max(xcuts[i], xcuts[i + 1]);
            if (nb - na <= 0.0 || v - u <= 0.0) continue;
            int lap = 0;
            const double imid = 0.5 * (u + v);
            for (int l = 0; l < map.lap_count(); ++l)
                if (map.lap(l).contains_closed(imid)) {
                    lap = l;
                    break;
                }
            // Under f^k the lower domain endpoint maps to u when the
            // piece is increasing and to v otherwise.
            const double fk_na = inc ? u : v;
            const double fk_nb = inc ? v : u;
            queue.push_back({na, nb, map.eval_lap(lap, fk_na), map.eval_lap(lap, fk_nb), k + 1});
        }
    };

    while (!queue.empty()) {
        const Cand c = queue.front();
        queue.pop_front();
        const double ilo = std::min(c.ia, c.ib), ihi = std::max(c.ia, c.ib);
        const bool inc = c.ib > c.ia;
        const double expansion = (ihi - ilo) / std::max(c.b - c.a, 1e-300);
        const double eps = 1e-12 * blen + 1e-15 * expansion;

        const double u = std::max(ilo, base.lo), v = std::min(ihi, base.hi);
        if (v - u > eps) {
            // Part of the image meets the base.
            const bool full = u <= base.lo + eps && v >= base.hi - eps;
            double xu = (u <= ilo + eps) ? (inc ? c.a : c.b) : pull_back(map, c, u);
            double xv = (v >= ihi - eps) ? (inc ? c.b : c.a) : pull_back(map, c, v);
            const double dlo = std::min(xu, xv), dhi = std::max(xu, xv);
            if (full) {
                Branch br;
                br.domain = {dlo, dhi};
                br.return_time = c.k;
                br.map = BranchMap::iterated(map, c.k);
                if (dhi - dlo > 0.0) tower.branches.push_back(br);
            } else {
                drop(dhi - dlo); // returned to the base without a full branch
            }
            // Pieces of the image beyond the base continue.
            if (ilo < base.lo - eps) {
                if (inc)
                    continue_piece(c.a, dlo, c.ia, base.lo, c.k);
                else
                    continue_piece(dhi, c.b, base.lo, c.ib, c.k);
            }
            if (ihi > base.hi + eps) {
                if (inc)
                    continue_piece(dhi, c.b, base.hi, c.ib, c.k);
                else
                    continue_piece(c.a, dlo, c.ia, base.hi, c.k);
            }
        } else {
            // Image misses the base entirely.
            continue_piece(c.a, c.b, c.ia, c.ib, c.k);
        }
    }

    std::sort(tower.branches.begin(), tower.branches.end(),
              [](const Branch& x, const Branch& y) { return x.domain.lo < y.domain.lo; });
    if (tower.unassigned_mass > 1e-3 * blen)
        tower.note = "NonMarkovBase: unassigned mass " + std::to_string(tower.unassigned_mass) +
                     " at R_max " + std::to_string(R_max);
    tower.budget = fit_budget(tower, 0.5, 32);
    return tower;
}

} // namespace ergodic
