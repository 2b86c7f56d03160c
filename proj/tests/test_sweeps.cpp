#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ergodic/empirical.hpp"
#include "ergodic/errors.hpp"
#include "ergodic/first_return.hpp"
#include "ergodic/prng.hpp"
#include "ergodic/sweeps.hpp"
#include "ergodic/tower.hpp"
#include "ergodic/wasserstein.hpp"

using namespace ergodic;

namespace {

EmpiricalMeasure dirac_1d(double x, double lo, double hi, int grid) {
    EmpiricalMeasure m;
    m.dims = 1;
    m.lo[0] = lo;
    m.hi[0] = hi;
    m.grid[0] = grid;
    m.grid[1] = 1;
    m.weights.assign(static_cast<std::size_t>(grid), 0.0);
    m.weights[static_cast<std::size_t>(m.cell_index(0, x))] = 1.0;
    return m;
}

EmpiricalMeasure dirac_2d(double x, double y, int grid) {
    EmpiricalMeasure m;
    m.dims = 2;
    m.lo[0] = -1.5;
    m.hi[0] = 1.5;
    m.lo[1] = -1.5;
    m.hi[1] = 1.5;
    m.grid[0] = grid;
    m.grid[1] = grid;
    m.weights.assign(static_cast<std::size_t>(grid) * grid, 0.0);
    m.weights[static_cast<std::size_t>(m.cell_index(0, x)) * grid + m.cell_index(1, y)] = 1.0;
    return m;
}

EmpiricalMeasure random_hist(double lo, double hi, int grid, std::uint64_t seed) {
    EmpiricalMeasure m = dirac_1d(lo, lo, hi, grid);
    Xoshiro256pp rng(seed);
    double total = 0.0;
    for (auto& w : m.weights) {
        w = rng.uniform();
        total += w;
    }
    for (auto& w : m.weights) w /= total;
    return m;
}

} // namespace

TEST_CASE("w1 distance closed forms") {
    const auto a = dirac_1d(0.0, 0.0, 1.0, 256);
    const auto b = dirac_1d(1.0 - 1e-9, 0.0, 1.0, 256);
    CHECK(w1_distance_1d(a, a) == 0.0);
    // Diracs at the extreme cells: transport cost is the cell-center gap.
    CHECK(w1_distance_1d(a, b) == doctest::Approx(1.0 - 1.0 / 256).epsilon(1e-12));

    // Uniform vs shifted uniform: CDF shift integral = shift.
    EmpiricalMeasure u1 = dirac_1d(0.0, 0.0, 1.0, 512);
    u1.weights.assign(512, 1.0 / 512);
    EmpiricalMeasure u2 = u1;
    u2.lo[0] = 0.1;
    u2.hi[0] = 1.1;
    CHECK(w1_distance_1d(u1, u2) == doctest::Approx(0.1).epsilon(2e-2));
}

TEST_CASE("w1 metric axioms on random histograms") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto x = random_hist(0.0, 1.0, 64, 100 + s);
        const auto y = random_hist(0.0, 1.0, 64, 200 + s);
        const auto z = random_hist(0.0, 1.0, 64, 300 + s);
        const double dxy = w1_distance_1d(x, y);
        const double dyx = w1_distance_1d(y, x);
        const double dxz = w1_distance_1d(x, z);
        const double dzy = w1_distance_1d(z, y);
        CHECK(dxy == dyx);               // symmetry exact
        CHECK(dxy >= 0.0);
        CHECK(dxy <= dxz + dzy + 1e-12); // triangle inequality
        CHECK(w1_distance_1d(x, x) == 0.0);
    }
}

TEST_CASE("sliced w1 in 2d") {
    const auto o = dirac_2d(0.0, 0.0, 128);
    CHECK(sliced_w1(o, o, 8) == 0.0);

    // Diracs at (0,0) and (1,0): mean of |cos theta_k| over 4 directions.
    const auto e1 = dirac_2d(1.0, 0.0, 128);
    const double expected = (1.0 + std::sqrt(2.0) / 2 + 0.0 + std::sqrt(2.0) / 2) / 4.0;
    CHECK(sliced_w1(o, e1, 4) == doctest::Approx(expected).epsilon(2e-2));

    // Translation bound: distance <= |v| for random translations.
    Xoshiro256pp rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const double cw = 3.0 / 128; // cell width of the dirac grids
        const double vx = (rng.uniform() - 0.5), vy = (rng.uniform() - 0.5);
        const auto p = dirac_2d(0.1, -0.2, 128);
        const auto q = dirac_2d(0.1 + vx, -0.2 + vy, 128);
        CHECK(sliced_w1(p, q, 8) <= std::hypot(vx, vy) + 2 * cw);
    }
}

TEST_CASE("sweep spec validation") {
    SweepSpec s;
    s.family = "tent-slope";
    s.base_param = 1.95;
    s.deltas = {0.0, 0.01};
    s.seeds = {1, 2};
    CHECK_NOTHROW(s.validate());

    SweepSpec no_zero = s;
    no_zero.deltas = {0.01};
    CHECK_THROWS_AS(no_zero.validate(), OutOfRange); // deltas must include 0

    SweepSpec no_seed = s;
    no_seed.seeds = {};
    CHECK_THROWS_AS(no_seed.validate(), OutOfRange);

    SweepSpec bad_family = s;
    bad_family.family = "lorenz";
    CHECK_THROWS_AS(bad_family.validate(), OutOfRange);
}

TEST_CASE("tent-slope stability sweep") {
    SweepSpec s;
    s.family = "tent-slope";
    s.base_param = 1.95;
    s.deltas = {0.0, 0.002, 0.04};
    s.seeds = {1, 2, 3};
    s.n = 200000;
    s.burn_in = 500;
    s.grid = 256;
    s.distance = "w1_1d";
    const auto rep = stability_sweep(s);
    REQUIRE(rep.rows.size() == 9);
    for (const auto& r : rep.rows) {
        CHECK(r.status == "ok");
        CHECK(std::isfinite(r.distance));
        if (r.delta == 0.0) CHECK(r.distance == 0.0); // same-seed self distance, exact
    }
    CHECK(rep.summary.at(0.0).median == 0.0);
    CHECK(rep.summary.at(0.002).median <= rep.summary.at(0.04).median + 5e-3);

    const auto csv = rep.to_csv();
    CHECK(csv.find("family,param_base,delta,seed,n,distance,entropy,lambda1,status") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("bernoulli-theta stability sweep matches the entropy closed form") {
    SweepSpec s;
    s.family = "bernoulli-theta";
    s.base_param = 0.5;
    s.deltas = {0.0, -0.01, -0.05};
    s.seeds = {1};
    s.grid = 1024;
    const auto rep = stability_sweep(s);
    for (const auto& r : rep.rows) {
        const double th = 0.5 + r.delta;
        const double h = (-th * std::log(th) - (1 - th) * std::log(1 - th)) / (2 - th);
        CHECK(r.status == "ok");
        CHECK(r.entropy == doctest::Approx(h).epsilon(1e-8));
        CHECK(std::fabs(r.entropy - rep.rows[0].entropy) <= 2.0 * std::fabs(r.delta) + 1e-9);
        if (r.delta == 0.0) CHECK(r.distance == 0.0);
    }
}

TEST_CASE("small henon sweep: self distance exactly zero, all rows finite") {
    SweepSpec s;
    s.family = "henon-a";
    s.base_param = 1.4;
    s.secondary = 0.3;
    s.deltas = {0.0, -0.001};
    s.seeds = {1, 2};
    s.n = 100000;
    s.burn_in = 500;
    s.grid = 256;
    s.distance = "sliced_w1";
    s.n_directions = 8;
    const auto rep = stability_sweep(s);
    REQUIRE(rep.rows.size() == 4);
    for (const auto& r : rep.rows) {
        CHECK(r.status == "ok");
        CHECK(std::isfinite(r.distance));
        CHECK(std::isfinite(r.lambda1));
        if (r.delta == 0.0) CHECK(r.distance == 0.0);
    }
}

TEST_CASE("entropy continuity sweeps") {
    // Bernoulli family against the Shannon/Abramov closed form.
    std::vector<double> thetas;
    for (int i = 1; i <= 19; ++i) thetas.push_back(0.05 * i);
    const auto rep = entropy_continuity_sweep("bernoulli", thetas, 1024, 0, 1);
    REQUIRE(rep.rows.size() == thetas.size());
    for (const auto& r : rep.rows) {
        const double th = r.theta;
        const double h = (-th * std::log(th) - (1 - th) * std::log(1 - th)) / (2 - th);
        CHECK(r.h == doctest::Approx(h).epsilon(1e-8));
    }
    // modulus table is nondecreasing in the gap
    for (std::size_t i = 1; i < rep.modulus.size(); ++i) {
        CHECK(rep.modulus[i].first > rep.modulus[i - 1].first);
        CHECK(rep.modulus[i].second >= rep.modulus[i - 1].second - 1e-15);
    }

    // Tent family via Birkhoff average of log|T'| = log s exactly.
    const auto tent = entropy_continuity_sweep("tent", {1.9, 1.95, 2.0}, 256, 100000, 5);
    for (const auto& r : tent.rows) CHECK(r.h == doctest::Approx(std::log(r.theta)).epsilon(1e-6));

    const auto csv = tent.to_csv();
    CHECK(csv.find("family,theta,h,status") == 0);
}

TEST_CASE("uniformity diagnostics") {
    const auto t0 = first_return_tower(Map1D::doubling(), {0.0, 0.5}, 40, 1e-12);

    // Tower against itself: everything vanishes, tails agree bit-for-bit
    // with return_time_stats.
    const auto self = uniformity_diagnostics(t0, t0, 6);
    CHECK(self.sym_diff_base_mass == 0.0);
    for (const auto& [j, v] : self.per_time_sym_diff) CHECK(v == 0.0);
    CHECK(self.tail_n == self.tail_0);
    const auto stats = return_time_stats(t0, QuotientDensity::uniform(t0.base, 64));
    CHECK(self.tail_0 == stats.tail(6));

    // Perturbed base: mass difference bounded by the base perturbation.
    const auto tn =
        first_return_tower(Map1D::doubling(), {0.0, 0.5 - std::pow(2.0, -10)}, 40, 1e-12);
    const auto diag = uniformity_diagnostics(tn, t0, 6);
    CHECK(diag.sym_diff_base_mass <= std::pow(2.0, -9) + 1e-6);
    CHECK(diag.tail_n >= 0.0);
    CHECK(diag.tail_0 >= 0.0);

    // Disjoint branch families: symmetric difference is the mass sum.
    auto a = doubling_tower();
    auto b = doubling_tower();
    a.branches[1].domain = {0.5, 0.75};
    a.branches[1].map = BranchMap::affine(4.0, -2.0);
    a.unassigned_mass = 0.25;
    b.branches.erase(b.branches.begin());
    b.branches[0].domain = {0.75, 1.0};
    b.branches[0].map = BranchMap::affine(4.0, -3.0);
    b.unassigned_mass = 0.75;
    // a covers [0,0.75), b covers [0.75,1): fully disjoint families.
    const auto dj = uniformity_diagnostics(a, b, 3);
    CHECK(dj.sym_diff_base_mass == doctest::Approx(0.75 + 0.25).epsilon(1e-12));

    // Towers on unrelated bases are rejected.
    const auto off = first_return_tower(Map1D::doubling(), {0.5, 1.0}, 10, 1e-12);
    CHECK_THROWS_AS(uniformity_diagnostics(t0, off, 4), BaseMismatch);
}
