#include "ergodic/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ergodic/errors.hpp"

namespace ergodic {

double w1_weighted_points(std::vector<double> pos_a, std::vector<double> wgt_a,
                          std::vector<double> pos_b, std::vector<double> wgt_b) {
    const double mass_a = std::accumulate(wgt_a.begin(), wgt_a.end(), 0.0);
    const double mass_b = std::accumulate(wgt_b.begin(), wgt_b.end(), 0.0);
    if (mass_a <= 0.0 || mass_b <= 0.0)
        throw IncompatibleSupports("a measure has no mass");

    // Merge the two supports; signed weights a - b, then integrate the
    // absolute CDF difference.
    struct Pt {
        double x, w;
    };
    std::vector<Pt> pts;
    pts.reserve(pos_a.size() + pos_b.size());
    for (std::size_t i = 0; i < pos_a.size(); ++i)
        if (wgt_a[i] != 0.0) pts.push_back({pos_a[i], wgt_a[i] / mass_a});
    for (std::size_t i = 0; i < pos_b.size(); ++i)
        if (wgt_b[i] != 0.0) pts.push_back({pos_b[i], -wgt_b[i] / mass_b});
    // Order ties by |weight| so coincident positions accumulate in a
    // reproducible sequence; positive and negative parts are then summed
    // separately, which makes identical measures cancel exactly instead of
    // leaving rounding residue that depends on how the sort broke ties.
    std::sort(pts.begin(), pts.end(), [](const Pt& p, const Pt& q) {
        if (p.x != q.x) return p.x < q.x;
        const double pa = std::fabs(p.w), qa = std::fabs(q.w);
        if (pa != qa) return pa < qa;
        return p.w < q.w;
    });
    std::size_t out = 0;
    for (std::size_t i = 0; i < pts.size();) {
        double pos = 0.0, neg = 0.0;
        const double x = pts[i].x;
        for (; i < pts.size() && pts[i].x == x; ++i)
            (pts[i].w >= 0.0 ? pos : neg) += pts[i].w;
        pts[out++] = {x, pos == -neg ? 0.0 : pos + neg};
    }
    pts.resize(out);

    double dist = 0.0, cdf = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        cdf += pts[i].w;
        dist += std::fabs(cdf) * (pts[i + 1].x - pts[i].x);
    }
    return dist;
}

static void extract_1d(const EmpiricalMeasure& m, std::vector<double>& pos,
                       std::vector<double>& wgt) {
    pos.clear();
    wgt.clear();
    for (int i = 0; i < m.grid[0]; ++i) {
        const double w = m.weights[static_cast<std::size_t>(i)];
        if (w > 0.0) {
            pos.push_back(m.cell_center(0, i));
            wgt.push_back(w);
        }
    }
}

double w1_distance_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (mu.dims != 1 || nu.dims != 1) throw OutOfRange("w1_distance_1d needs 1D measures");
    std::vector<double> pa, wa, pb, wb;
    extract_1d(mu, pa, wa);
    extract_1d(nu, pb, wb);
    return w1_weighted_points(std::move(pa), std::move(wa), std::move(pb), std::move(wb));
}

double sliced_w1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, int n_directions) {
    if (n_directions < 4) throw OutOfRange("n_directions must be >= 4");
    if (mu.dims != 2 || nu.dims != 2) throw OutOfRange("sliced_w1 needs 2D measures");
    double sum = 0.0;
    for (int k = 0; k < n_directions; ++k) {
        const double theta = k * M_PI / n_directions;
        const double cx = std::cos(theta), cy = std::sin(theta);
        std::vector<double> pa, wa, pb, wb;
        auto project = [&](const EmpiricalMeasure& m, std::vector<double>& pos,
                           std::vector<double>& wgt) {
            for (int ix = 0; ix < m.grid[0]; ++ix)
                for (int iy = 0; iy < m.grid[1]; ++iy) {
                    const double w = m.weights[static_cast<std::size_t>(ix) * m.grid[1] + iy];
                    if (w > 0.0) {
                        pos.push_back(cx * m.cell_center(0, ix) + cy * m.cell_center(1, iy));
                        wgt.push_back(w);
                    }
                }
        };
        project(mu, pa, wa);
        project(nu, pb, wb);
        sum += w1_weighted_points(std::move(pa), std::move(wa), std::move(pb), std::move(wb));
    }
    return sum / n_directions;
}

} // namespace ergodic
