#pragma once

#include <cmath>

#include "ergodic/errors.hpp"

namespace ergodic {

// Distortion constants controlling Jacobian regularity of a tower.
//   C, beta : one-step regularity constants
//   C0      : one-step Jacobian-ratio bound, |JF(x)/JF(y) - 1| <= C0 beta^s
//   C1      : cylinder Jacobian-ratio bound over all depths (>= 1)
//   C2      : log-Jacobian growth rate, log JF(x) <= C2 * tau
//   K       : density bound, always exp(C1 / (1 - beta))
struct DistortionBudget {
    double C = 0.0;
    double beta = 0.5;
    double C0 = 0.0;
    double C1 = 1.0;
    double C2 = 0.0;
    bool fitted = false; // true when the constants were estimated by sampling

    double K() const { return std::exp(C1 / (1.0 - beta)); }

    void check() const {
        if (!(beta > 0.0 && beta < 1.0)) throw OutOfRange("beta must lie in (0,1)");
        if (C < 0.0 || C0 < 0.0 || C1 < 0.0 || C2 < 0.0)
            throw OutOfRange("budget constants must be nonnegative");
        if (C2 < 2.0 * C) throw OutOfRange("C2 must be >= 2*C");
    }
};

} // namespace ergodic
