#pragma once

#include <algorithm>
#include <cmath>

namespace ergodic {

// Half-open interval [lo, hi).  Branch domains use this convention so
// partition points belong to exactly one branch.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x < hi; }
    bool contains_closed(double x) const { return x >= lo && x <= hi; }
    bool empty(double eps = 0.0) const { return hi - lo <= eps; }
};

inline Interval intersect(const Interval& a, const Interval& b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

inline bool approx_equal(double a, double b, double tol) {
    return std::fabs(a - b) <= tol;
}

} // namespace ergodic
