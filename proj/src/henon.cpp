#include "ergodic/henon.hpp"

#include <algorithm>
#include <cmath>

#include "ergodic/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ergodic {

static double norm2(const Vec2& v) { return std::sqrt(v.x * v.x + v.y * v.y); }

Vec2 HenonMap::iterate(const Vec2& z0, int n) const {
    Vec2 z = z0;
    for (int i = 0; i < n; ++i) {
        z = eval(z);
        if (norm2(z) > 1e6) throw OrbitDiverged("after " + std::to_string(i + 1) + " iterations");
    }
    return z;
}

std::vector<Vec2> HenonMap::orbit(const Vec2& z0, int n) const {
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    Vec2 z = z0;
    out.push_back(z);
    for (int i = 0; i < n; ++i) {
        z = eval(z);
        if (norm2(z) > 1e6) throw OrbitDiverged("after " + std::to_string(i + 1) + " iterations");
        out.push_back(z);
    }
    return out;
}

FixedPointData henon_fixed_point(const HenonMap& map) {
    const double disc = (1.0 - map.b) * (1.0 - map.b) + 4.0 * map.a;
    if (disc <= 0.0) throw NoRealFixedPoint("discriminant " + std::to_string(disc));
    FixedPointData fp;
    const double xs = (map.b - 1.0 + std::sqrt(disc)) / (2.0 * map.a);
    fp.z_star = {xs, map.b * xs};
    // Eigenvalues of [[-2 a x*, 1], [b, 0]].
    const double tr = -2.0 * map.a * xs;
    const double rad = std::sqrt(tr * tr / 4.0 + map.b);
    const double l1 = tr / 2.0 + rad;
    const double l2 = tr / 2.0 - rad;
    if (std::fabs(l1) > std::fabs(l2)) {
        fp.unstable_eigenvalue = l1;
        fp.stable_eigenvalue = l2;
    } else {
        fp.unstable_eigenvalue = l2;
        fp.stable_eigenvalue = l1;
    }
    Vec2 v{fp.unstable_eigenvalue, map.b}; // eigenvector of the derivative
    const double n = norm2(v);
    fp.unstable_direction = {v.x / n, v.y / n};
    return fp;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

double distance_to_boundary(const std::vector<Vec2>& poly, const Vec2& p) {
    double best = 1e300;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[j];
        const Vec2& b = poly[i];
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double ex = p.x - (a.x + t * dx), ey = p.y - (a.y + t * dy);
        best = std::min(best, std::sqrt(ex * ex + ey * ey));
    }
    return best;
}

CheckReport trapping_region_check(const HenonMap& map, const TrappingRegion& region,
                                  int n_boundary_samples, int n_interior_samples,
                                  int n_steps, std::uint64_t seed) {
    const auto& poly = region.polygon;
    CheckReport rep;
    if (poly.size() < 3) return rep;

    std::vector<Vec2> samples;
    // Boundary points, equally spaced in arc length.
    double perimeter = 0.0;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        perimeter += norm2({poly[i].x - poly[j].x, poly[i].y - poly[j].y});
    if (n_boundary_samples > 0 && perimeter > 0.0) {
        const double step = perimeter / n_boundary_samples;
        double carried = 0.0;
        for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
            const Vec2& a = poly[j];
            const Vec2& b = poly[i];
            const double seg = norm2({b.x - a.x, b.y - a.y});
            double t = carried;
            while (t < seg) {
                samples.push_back({a.x + (b.x - a.x) * t / seg, a.y + (b.y - a.y) * t / seg});
                t += step;
            }
            carried = t - seg;
        }
    }
    // Interior points by rejection sampling inside the bounding box.
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& v : poly) {
        xlo = std::min(xlo, v.x);
        xhi = std::max(xhi, v.x);
        ylo = std::min(ylo, v.y);
        yhi = std::max(yhi, v.y);
    }
    Xoshiro256pp rng(seed);
    int placed = 0, attempts = 0;
    while (placed < n_interior_samples && attempts < 1000 * std::max(1, n_interior_samples)) {
        Vec2 p{rng.uniform(xlo, xhi), rng.uniform(ylo, yhi)};
        ++attempts;
        if (point_in_polygon(poly, p)) {
            samples.push_back(p);
            ++placed;
        }
    }

    rep.n_checked = static_cast<int>(samples.size());
    int escaped = 0;
    double min_dist = 1e300;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : escaped) reduction(min : min_dist)
#endif
    for (int s = 0; s < static_cast<int>(samples.size()); ++s) {
        Vec2 z = samples[static_cast<std::size_t>(s)];
        bool out = false;
        for (int i = 0; i < n_steps && !out; ++i) {
            z = map.eval(z);
            if (norm2(z) > 1e6 || !point_in_polygon(poly, z)) {
                out = true;
                break;
            }
            min_dist = std::min(min_dist, distance_to_boundary(poly, z));
        }
        if (out) escaped += 1;
    }
    rep.n_escaped = escaped;
    rep.min_distance = min_dist == 1e300 ? 0.0 : min_dist;
    rep.pass = escaped == 0 && rep.n_checked > 0;
    return rep;
}

std::vector<Vec2> unstable_manifold_segment(const HenonMap& map, double arc_length, int n_points) {
    const FixedPointData fp = henon_fixed_point(map);
    const double eps = 1e-7;
    const Vec2 v = fp.unstable_direction;

    // Points are images of the seed segment z* + t*eps*v under f^(2m);
    // f^2 keeps the segment on one side when the eigenvalue is negative.
    auto image_point = [&](double t, int m) {
        Vec2 z{fp.z_star.x + t * eps * v.x, fp.z_star.y + t * eps * v.y};
        return map.iterate(z, 2 * m);
    };

    const double lam2 = fp.unstable_eigenvalue * fp.unstable_eigenvalue;
    int m = 0;
    double est = eps;
    while (est < 2.0 * arc_length && m < 60) {
        ++m;
        est *= lam2;
    }

    // Adaptive sampling of t in [0, 1] so consecutive images are close.
    const double spacing = arc_length / std::max(16, n_points);
    std::vector<std::pair<double, Vec2>> pts;
    pts.push_back({0.0, image_point(0.0, m)});
    pts.push_back({1.0, image_point(1.0, m)});
    bool refined = true;
    int guard = 0;
    while (refined && ++guard < 40) {
        refined = false;
        std::vector<std::pair<double, Vec2>> out;
        out.reserve(pts.size() * 2);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            out.push_back(pts[i]);
            const Vec2 d{pts[i + 1].second.x - pts[i].second.x,
                         pts[i + 1].second.y - pts[i].second.y};
            if (norm2(d) > spacing && pts[i + 1].first - pts[i].first > 1e-12) {
                const double tm = 0.5 * (pts[i].first + pts[i + 1].first);
                out.push_back({tm, image_point(tm, m)});
                refined = true;
            }
        }
        out.push_back(pts.back());
        pts.swap(out);
        if (pts.size() > 2'000'000) break;
    }

    // Truncate at the requested arc length and resample to n_points.
    std::vector<double> cum(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec2 d{pts[i].second.x - pts[i - 1].second.x,
                     pts[i].second.y - pts[i - 1].second.y};
        cum[i] = cum[i - 1] + norm2(d);
    }
    const double total = std::min(cum.back(), arc_length);
    std::vector<Vec2> poly;
    poly.reserve(static_cast<std::size_t>(n_points));
    poly.push_back(fp.z_star);
    std::size_t j = 1;
    for (int i = 1; i < n_points; ++i) {
        const double target = total * i / (n_points - 1);
        while (j + 1 < pts.size() && cum[j] < target) ++j;
        const double seg = cum[j] - cum[j - 1];
        const double t = seg > 0.0 ? (target - cum[j - 1]) / seg : 0.0;
        poly.push_back({pts[j - 1].second.x + t * (pts[j].second.x - pts[j - 1].second.x),
                        pts[j - 1].second.y + t * (pts[j].second.y - pts[j - 1].second.y)});
    }
    return poly;
}

TrappingRegion default_henon_trap() {
    // Henon's quadrilateral for (a, b) = (1.4, 0.3).
    return {{{-1.33, 0.42}, {1.32, 0.133}, {1.245, -0.14}, {-1.06, -0.5}}};
}

} // namespace ergodic
