#include "ergodic/branch.hpp"

#include <cmath>

#include "ergodic/errors.hpp"

namespace ergodic {

BranchMap BranchMap::affine(double a, double b) {
    BranchMap m;
    m.kind = Kind::Affine;
    m.a = a;
    m.b = b;
    return m;
}

BranchMap BranchMap::iterated(const Map1D& map, int n) {
    BranchMap m;
    m.kind = Kind::IteratedModel;
    m.model = map;
    m.iterations = n;
    return m;
}

double BranchMap::eval(double x) const {
    if (kind == Kind::Affine) return a * x + b;
    return model->iterate(x, iterations);
}

double BranchMap::deriv(double x) const {
    if (kind == Kind::Affine) return a;
    double d = 1.0;
    for (int i = 0; i < iterations; ++i) {
        d *= model->deriv(x);
        x = model->eval(x);
    }
    return d;
}

std::string BranchMap::describe() const {
    if (kind == Kind::Affine)
        return "affine " + std::to_string(a) + " " + std::to_string(b);
    return "model " + model->name() + " " + std::to_string(model->param()) + " " +
           std::to_string(iterations);
}

double Branch::jacobian(double x) const {
    if (jacobian_const) return jacobian_value;
    double d = std::fabs(map.deriv(x));
    return d;
}

bool Branch::increasing() const {
    // Compare images of interior points; endpoints may sit on breakpoints.
    const double x0 = domain.lo + 0.25 * domain.length();
    const double x1 = domain.lo + 0.75 * domain.length();
    return map.eval(x1) > map.eval(x0);
}

double Branch::invert(double y) const {
    if (map.kind == BranchMap::Kind::Affine)
        return std::clamp((y - map.b) / map.a, domain.lo, domain.hi);
    double lo = domain.lo, hi = domain.hi;
    const bool inc = increasing();
    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * (1.0 + std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fy = map.eval(mid);
        if ((fy < y) == inc)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace ergodic
