#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergodic/interval.hpp"
#include "ergodic/prng.hpp"

namespace ergodic {

// Piecewise monotone interval maps used as 1D models: the doubling map
// 2x mod 1 on [0,1), the tent map with slope s on [0,1], the logistic
// map 4x(1-x) on [0,1] and the quadratic family 1 - a x^2 on [-1,1].
class Map1D {
  public:
    enum class Kind { Doubling, Tent, Logistic, Quadratic };

    static Map1D doubling();
    static Map1D tent(double slope);
    static Map1D logistic();
    static Map1D quadratic(double a);
    static Map1D from_name(const std::string& name, double param);

    Kind kind() const { return kind_; }
    double param() const { return param_; }
    Interval domain() const { return domain_; }
    std::string name() const;

    double eval(double x) const;
    // Throws CriticalPoint at listed turning points of tent/quadratic/logistic.
    double deriv(double x) const;

    // Interior points where monotonicity (or continuity) breaks.
    std::vector<double> breakpoints() const;

    // Monotone laps covering the domain; eval_lap evaluates with the lap's
    // closure convention so piece endpoints map consistently during the
    // first-return construction.
    int lap_count() const;
    Interval lap(int i) const;
    double eval_lap(int i, double x) const;

    double iterate(double x, int n) const;
    std::vector<double> orbit(double x, int n) const;

    // Dyadic maps shift mantissa bits, so a double-precision orbit falls
    // onto 0 after ~53 steps.  Statistical estimators therefore sample
    // doubling orbits through OrbitSampler, which feeds fresh low bits
    // from the run's PRNG; the sliding window is exactly the stationary
    // symbolic process of the map.
    bool needs_bitstream() const { return kind_ == Kind::Doubling; }

  private:
    Map1D(Kind k, double p, Interval d) : kind_(k), param_(p), domain_(d) {}
    Kind kind_;
    double param_;
    Interval domain_;
};

// Deterministic orbit generator for statistical estimators.  For generic
// maps it is plain iteration; for the doubling map it maintains a 64-bit
// window over a bit stream seeded by (x0, seed).
class OrbitSampler {
  public:
    OrbitSampler(const Map1D& map, double x0, std::uint64_t seed);
    double current() const { return x_; }
    double step(); // advance one iterate, return the new point

  private:
    const Map1D map_;
    double x_;
    bool bitstream_;
    std::uint64_t window_ = 0;
    Xoshiro256pp rng_;
};

} // namespace ergodic
