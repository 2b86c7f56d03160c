#pragma once

#include <cstdint>

#include "ergodic/empirical.hpp"
#include "ergodic/henon.hpp"
#include "ergodic/map1d.hpp"
#include "ergodic/observable.hpp"
#include "ergodic/tower.hpp"

namespace ergodic {

double birkhoff_average(const Map1D& map, const Observable& phi, double x0, long long burn_in,
                        long long n, std::uint64_t seed);

struct LyapunovEstimate {
    double lambda1 = 0.0;
    double lambda2 = 0.0; // 2D only
    int dims = 1;
    long long n = 0;
    int renorm_every = 10;
    std::uint64_t seed = 0;
    double ci_halfwidth = 0.0; // half-range across 10 disjoint blocks
};

LyapunovEstimate lyapunov_spectrum(const HenonMap& map, const Vec2& z0, long long n,
                                   int renorm_every, std::uint64_t seed);
LyapunovEstimate lyapunov_spectrum(const Map1D& map, double x0, long long n,
                                   std::uint64_t seed);

struct SaturationResult {
    EmpiricalMeasure measure; // normalized SRB estimate on the map's domain
    double mass = 0.0;        // unnormalized level-sum mass (should equal sigma)
};

SaturationResult saturate_measure(const GibbsMarkovTower& tower, const QuotientDensity& density,
                                  const Map1D& map, int grid);

struct RelationReport {
    double lambda_induced = 0.0;
    double lambda_map = 0.0;
    double sigma = 0.0;
    double defect = 0.0; // |lambda_induced - sigma * lambda_map|
};

RelationReport induced_lyapunov_check(const GibbsMarkovTower& tower,
                                      const QuotientDensity& density, const Map1D& map,
                                      double x0, long long n, std::uint64_t seed);

double pesin_defect(const Map1D& map, const GibbsMarkovTower& tower,
                    const QuotientDensity& density, double x0, long long n, std::uint64_t seed);

} // namespace ergodic
