#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ergodic/tower.hpp"

namespace ergodic {

// Parameter sweep over a one-parameter family.  Families:
//   henon-a         : Henon with a = base + delta (b fixed), sliced W1 in 2D
//   tent-slope      : tent slope s = base + delta, W1 on [0,1]
//   bernoulli-theta : tower p = (theta, 1-theta), tau = (1, 2); W1 between
//                     quotient invariant densities
struct SweepSpec {
    std::string family = "henon-a";
    double base_param = 1.4;
    double secondary = 0.3; // Henon b; unused elsewhere
    std::vector<double> deltas{0.0};
    std::vector<std::uint64_t> seeds{1};
    long long n = 1000000;
    long long burn_in = 1000;
    int grid = 512;
    std::string distance = "sliced_w1";
    int n_directions = 8;

    void validate() const;
};

struct StabilityRow {
    double delta = 0.0;
    std::uint64_t seed = 0;
    long long n = 0;
    double distance = 0.0;
    double entropy = 0.0; // NaN when not applicable
    double lambda1 = 0.0; // NaN when not applicable
    std::string status = "ok";
};

struct DeltaSummary {
    double median = 0.0;
    double iqr = 0.0;
    int n_ok = 0;
};

struct StabilityReport {
    std::string family;
    double base_param = 0.0;
    std::vector<StabilityRow> rows;
    std::map<double, DeltaSummary> summary; // keyed by delta

    std::string to_csv() const;
};

StabilityReport stability_sweep(const SweepSpec& spec);

// Entropy along a 1D family; rows are (theta, h).  family is "bernoulli"
// (tower entropy) or "tent" (Birkhoff average of log|T'|).
struct EntropyRow {
    double theta = 0.0;
    double h = 0.0;
    std::string status = "ok";
};

struct EntropyContinuityReport {
    std::string family;
    std::vector<EntropyRow> rows;
    // Modulus of continuity on the sampled grid: for each distinct gap
    // delta, max |h(t) - h(t')| over |t - t'| <= delta.
    std::vector<std::pair<double, double>> modulus;
    std::string to_csv() const;
};

EntropyContinuityReport entropy_continuity_sweep(const std::string& family,
                                                 const std::vector<double>& thetas, int grid,
                                                 long long n, std::uint64_t seed);

struct UniformityDiagnostics {
    double sym_diff_base_mass = 0.0;           // U2 proxy
    std::map<int, double> per_time_sym_diff;   // U4 proxy, depth 1, j <= N
    double deep_sym_diff = -1.0;               // depth-k word matching, -1 when off
    double tail_n = 0.0;                       // U5 for the perturbed tower
    double tail_0 = 0.0;                       // U5 for the reference tower
};

UniformityDiagnostics uniformity_diagnostics(const GibbsMarkovTower& tower_n,
                                             const GibbsMarkovTower& tower_0, int N,
                                             int depth = 1);

} // namespace ergodic
