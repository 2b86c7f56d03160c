#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergodic/branch.hpp"
#include "ergodic/budget.hpp"
#include "ergodic/interval.hpp"
#include "ergodic/map1d.hpp"

namespace ergodic {

// Finite truncation of a countable full-branch induced map on a base
// interval.  The reference measure on the base is normalized length;
// masses reported by the operations below are relative to it.
struct GibbsMarkovTower {
    Interval base{0.0, 1.0};
    std::vector<Branch> branches;
    int R_max = 64;
    double unassigned_mass = 0.0; // absolute length not covered by branches
    DistortionBudget budget;
    std::optional<Map1D> source_map; // set when branches are iterates of a model map
    std::string name = "tower";
    // Non-fatal construction diagnostics (e.g. a non-Markov base leaving
    // substantial unassigned mass).  Empty when construction was clean.
    std::string note;

    // Relative (normalized) mass of a subinterval of the base.
    double rel(double len) const { return len / base.length(); }

    // Index of the branch whose domain contains x, or -1.
    int branch_of(double x) const;
};

// Piecewise-constant density on a uniform grid over the tower base,
// normalized against the reference measure (mean of values == 1).
struct QuotientDensity {
    Interval base{0.0, 1.0};
    int grid = 4096;
    std::vector<double> values;
    double residual = 0.0; // L1 distance between the density and its transfer image
    int iterations = 0;

    static QuotientDensity uniform(const Interval& base, int grid);

    double cell_width() const { return base.length() / grid; }
    double midpoint(int i) const { return base.lo + (i + 0.5) * cell_width(); }
    int cell_of(double x) const;
    double at(double x) const { return values[cell_of(x)]; }
    double integral() const; // against the normalized reference measure
};

struct ReturnTimeStats {
    std::map<int, double> histogram; // return time -> invariant mass
    double sigma = 0.0;              // mean return time
    double truncated_mass = 0.0;     // relative base mass beyond R_max
    double tail(int N) const;
};

// Shared tail sum: sum_{j >= N} j * mass{R = j}.  Used by both the
// return-time stats and the uniformity diagnostics.
double weighted_tail(const std::map<int, double>& histogram, int N);

struct AxiomCheck {
    std::string axiom;
    bool pass = true;
    double margin = 0.0;
};

struct ValidationReport {
    std::vector<AxiomCheck> checks;
    bool all_pass() const;
};

struct BoundReport {
    double estimate = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    bool pass = false;
};

// ----- operations ---------------------------------------------------------

ValidationReport validate_tower(const GibbsMarkovTower& tower, int samples_per_branch);

// Precomputed transfer kernel on a fixed grid, in sparse row form: the
// preimage of each target cell under each branch is an interval, and its
// overlap lengths with source cells become the row weights.  This is the
// Galerkin projection of the transfer operator onto piecewise-constant
// densities; it conserves mass exactly and is exact on affine towers.
class TransferKernel {
  public:
    TransferKernel(const GibbsMarkovTower& tower, const Interval& base, int grid);
    void apply_serial(const std::vector<double>& in, std::vector<double>& out) const;
    void apply_parallel(const std::vector<double>& in, std::vector<double>& out) const;
    int grid() const { return grid_; }

  private:
    int grid_;
    std::vector<std::size_t> row_ptr_; // grid_ + 1
    std::vector<int> src_;
    std::vector<double> wgt_;
};

QuotientDensity transfer_step(const GibbsMarkovTower& tower, const QuotientDensity& density);

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 100000;
    bool cesaro = false; // average the iterates instead of plain power iteration
    bool check_bounds = true;
    // Internal grid refinement; the solve runs on grid * oversample cells
    // and the result is averaged back down (exactly).  0 = automatic:
    // 1 for all-affine towers, which the kernel represents exactly, and
    // enough to reach ~2^18 cells otherwise, where curvature and density
    // singularities would pollute a coarse kernel.
    int oversample = 0;
};

QuotientDensity solve_invariant_density(const GibbsMarkovTower& tower, int grid,
                                        const SolveOptions& opts = {});

ReturnTimeStats return_time_stats(const GibbsMarkovTower& tower, const QuotientDensity& density);

struct EntropyOptions {
    // Integrate log JF against the invariant measure rho dm (default) or
    // against the reference measure m itself.
    bool against_reference = false;
};

double entropy(const GibbsMarkovTower& tower, const QuotientDensity& density,
               const EntropyOptions& opts = {});

int separation_time(const GibbsMarkovTower& tower, double x, double y, int cap);

std::vector<int> consecutive_returns(const GibbsMarkovTower& tower, double x, int k);

BoundReport deep_return_bound_check(const GibbsMarkovTower& tower, const QuotientDensity& density,
                                    int k, int N, int n_samples, std::uint64_t seed);

std::vector<double> saturation_profile(const GibbsMarkovTower& tower,
                                       const QuotientDensity& density, int L);

// Invariant mass of a branch domain under rho dm, split at grid-cell
// boundaries.  The workhorse behind sigma, entropy and the saturation
// profile.
double branch_mass(const Branch& branch, const QuotientDensity& density);

// Fit distortion constants by sampling branch Jacobians; the result is
// flagged as empirical.  beta is kept as supplied.
DistortionBudget fit_budget(const GibbsMarkovTower& tower, double beta, int samples_per_branch);

// ----- builtin towers -----------------------------------------------------

GibbsMarkovTower doubling_tower();
// Affine full-branch tower with given domain masses and return times.
GibbsMarkovTower bernoulli_tower(const std::vector<double>& masses, const std::vector<int>& taus);
// Single-level tower for the logistic map 4x(1-x): two monotone laps, tau = 1.
GibbsMarkovTower ulam_tower();

} // namespace ergodic
