#pragma once

#include <optional>
#include <string>

#include "ergodic/interval.hpp"
#include "ergodic/map1d.hpp"

namespace ergodic {

// Map attached to a tower branch: either an affine bijection a*x + b or
// the tau-fold iterate of a model map restricted to the branch domain.
struct BranchMap {
    enum class Kind { Affine, IteratedModel };
    Kind kind = Kind::Affine;
    double a = 1.0, b = 0.0;      // Affine
    std::optional<Map1D> model;   // IteratedModel
    int iterations = 1;

    static BranchMap affine(double a, double b);
    static BranchMap iterated(const Map1D& map, int n);

    double eval(double x) const;
    double deriv(double x) const; // signed derivative (chain rule for iterates)
    std::string describe() const;
};

// Full branch of a Gibbs-Markov tower: a half-open domain mapped
// monotonically onto the whole base in return_time steps of the
// underlying system.
struct Branch {
    Interval domain;
    int return_time = 1;
    BranchMap map;
    bool jacobian_const = false; // explicit constant Jacobian overrides
    double jacobian_value = 1.0;

    double eval(double x) const { return map.eval(x); }
    double jacobian(double x) const;
    bool increasing() const;

    // Preimage of y under the branch map, by monotone bisection on the
    // domain closure (width-of-interval stopping near machine precision).
    double invert(double y) const;
};

} // namespace ergodic
