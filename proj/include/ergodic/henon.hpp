#pragma once

#include <cstdint>
#include <vector>

#include "ergodic/prng.hpp"

namespace ergodic {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

struct Mat2 {
    // [[m00, m01], [m10, m11]]
    double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
    Vec2 apply(const Vec2& v) const { return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y}; }
    double det() const { return m00 * m11 - m01 * m10; }
};

// (x, y) -> (1 - a x^2 + y, b x).
struct HenonMap {
    double a = 1.4;
    double b = 0.3;

    Vec2 eval(const Vec2& z) const { return {1.0 - a * z.x * z.x + z.y, b * z.x}; }
    Mat2 deriv(const Vec2& z) const { return {-2.0 * a * z.x, 1.0, b, 0.0}; }

    // Throws OrbitDiverged when the orbit norm exceeds 1e6.
    Vec2 iterate(const Vec2& z0, int n) const;
    std::vector<Vec2> orbit(const Vec2& z0, int n) const;
};

struct FixedPointData {
    Vec2 z_star;
    double unstable_eigenvalue = 0.0;
    double stable_eigenvalue = 0.0;
    Vec2 unstable_direction; // unit vector
};

FixedPointData henon_fixed_point(const HenonMap& map);

struct TrappingRegion {
    std::vector<Vec2> polygon; // simple closed polygon, implicit closing edge
};

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p);
double distance_to_boundary(const std::vector<Vec2>& poly, const Vec2& p);

struct CheckReport {
    bool pass = false;
    int n_checked = 0;
    int n_escaped = 0;
    double min_distance = 0.0; // over all retained iterates, to the polygon boundary
};

CheckReport trapping_region_check(const HenonMap& map, const TrappingRegion& region,
                                  int n_boundary_samples, int n_interior_samples,
                                  int n_steps, std::uint64_t seed);

// Polyline along the unstable manifold of the fixed point, starting at
// z* and grown to at least arc_length, resampled to n_points.
std::vector<Vec2> unstable_manifold_segment(const HenonMap& map, double arc_length, int n_points);

// Default trapping quadrilateral for parameters near (1.4, 0.3).
TrappingRegion default_henon_trap();

} // namespace ergodic
