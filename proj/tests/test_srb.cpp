#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ergodic/empirical.hpp"
#include "ergodic/errors.hpp"
#include "ergodic/estimators.hpp"
#include "ergodic/first_return.hpp"
#include "ergodic/henon.hpp"
#include "ergodic/observable.hpp"
#include "ergodic/tower.hpp"

using namespace ergodic;

TEST_CASE("empirical measures are normalized histograms") {
    const HenonMap h{1.4, 0.3};
    const auto m = empirical_measure_2d(h, {0.0, 0.0}, 1000, 200000, 128, 64, -1.9, 1.9, -0.6,
                                        0.6, 21);
    CHECK(m.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.dims == 2);
    CHECK(!m.expanded);

    // Stationary orbit: all mass in the single cell holding z*.  Kept
    // short because rounding noise is amplified by the unstable
    // eigenvalue (~1.92 per step) and leaves the cell after ~50 steps.
    const auto fp = henon_fixed_point(h);
    const auto mfix = empirical_measure_2d(h, fp.z_star, 0, 30, 128, 64, -1.9, 1.9, -0.6,
                                           0.6, 22);
    CHECK(mfix.total() == doctest::Approx(1.0).epsilon(1e-12));
    const int ix = mfix.cell_index(0, fp.z_star.x);
    const int iy = mfix.cell_index(1, fp.z_star.y);
    CHECK(mfix.weights[static_cast<std::size_t>(ix) * mfix.grid[1] + iy] ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical measure auto-expands bounds once and stays normalized") {
    // Logistic orbit on [0,1] recorded with too-small initial bounds.
    const auto m = empirical_measure_1d(Map1D::logistic(), 0.2, 100, 50000, 256, 0.2, 0.4, 23);
    CHECK(m.expanded);
    CHECK(m.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.lo[0] <= 0.0 + 1e-9);
    CHECK(m.hi[0] >= 1.0 - 1e-9);
}

TEST_CASE("doubling orbit histogram is uniform to binomial error") {
    const int grid = 64;
    const long long n = 2000000;
    const auto m = empirical_measure_1d(Map1D::doubling(), 0.37, 1000, n, grid, 0.0, 1.0, 24);
    const double p = 1.0 / grid;
    const double se = std::sqrt(p * (1.0 - p) / n);
    int within = 0;
    for (double wgt : m.weights)
        if (std::fabs(wgt - p) <= 3.0 * se) ++within;
    CHECK(static_cast<double>(within) / grid >= 0.96);
}

TEST_CASE("birkhoff averages") {
    const auto d = Map1D::doubling();
    CHECK(birkhoff_average(d, Observable::parse("0.7"), 0.3, 100, 10000, 31) ==
          doctest::Approx(0.7).epsilon(1e-12));
    CHECK(birkhoff_average(d, Observable::parse("x"), 0.3, 1000, 2000000, 32) ==
          doctest::Approx(0.5).epsilon(1e-3 / 0.5));
    CHECK(birkhoff_average(Map1D::logistic(), Observable::parse("logderiv"), 0.2, 1000, 2000000,
                           33) == doctest::Approx(std::log(2.0)).epsilon(5e-3));
}

TEST_CASE("lyapunov spectra") {
    const auto ld = lyapunov_spectrum(Map1D::doubling(), 0.3, 100000, 41);
    CHECK(ld.lambda1 == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(ld.dims == 1);

    const HenonMap h{1.4, 0.3};
    const auto l2 = lyapunov_spectrum(h, {0.0, 0.0}, 400000, 10, 42);
    CHECK(l2.lambda1 >= l2.lambda2);
    CHECK(l2.lambda1 > 0.3);
    CHECK(std::fabs(l2.lambda1 + l2.lambda2 - std::log(0.3)) < 1e-6);
    CHECK(l2.ci_halfwidth > 0.0);
    CHECK_THROWS_AS(lyapunov_spectrum(h, {10.0, 10.0}, 100000, 10, 43), OrbitDiverged);
}

TEST_CASE("estimators are deterministic in the seed") {
    const HenonMap h{1.4, 0.3};
    const auto a = empirical_measure_2d(h, {0.0, 0.0}, 500, 100000, 64, 32, -1.9, 1.9, -0.6, 0.6,
                                        77);
    const auto b = empirical_measure_2d(h, {0.0, 0.0}, 500, 100000, 64, 32, -1.9, 1.9, -0.6, 0.6,
                                        77);
    REQUIRE(a.weights.size() == b.weights.size());
    for (std::size_t i = 0; i < a.weights.size(); ++i) CHECK(a.weights[i] == b.weights[i]);

    const auto l1 = lyapunov_spectrum(h, {0.0, 0.0}, 100000, 10, 78);
    const auto l2 = lyapunov_spectrum(h, {0.0, 0.0}, 100000, 10, 78);
    CHECK(l1.lambda1 == l2.lambda1);
    CHECK(l1.lambda2 == l2.lambda2);

    const auto b1 = birkhoff_average(Map1D::doubling(), Observable::parse("x"), 0.3, 100, 50000, 79);
    const auto b2 = birkhoff_average(Map1D::doubling(), Observable::parse("x"), 0.3, 100, 50000, 79);
    CHECK(b1 == b2);
}

TEST_CASE("saturation reproduces the acim") {
    // Trivial doubling tower: saturated measure is Lebesgue on [0,1].
    const auto d = first_return_tower(Map1D::doubling(), {0.0, 1.0}, 8, 1e-10);
    const auto rho_d = solve_invariant_density(d, 1024);
    const auto s1 = saturate_measure(d, rho_d, Map1D::doubling(), 256);
    CHECK(s1.mass == doctest::Approx(1.0).epsilon(1e-8));
    for (double wgt : s1.measure.weights)
        CHECK(wgt == doctest::Approx(1.0 / 256).epsilon(1e-6));

    // First-return tower over [0, 1/2): same acim, mass sigma = 2.
    const auto fr = first_return_tower(Map1D::doubling(), {0.0, 0.5}, 40, 1e-12);
    const auto rho = solve_invariant_density(fr, 1024);
    const auto s2 = saturate_measure(fr, rho, Map1D::doubling(), 256);
    CHECK(s2.mass == doctest::Approx(2.0).epsilon(1e-6));
    double l1 = 0.0;
    for (double wgt : s2.measure.weights) l1 += std::fabs(wgt - 1.0 / 256);
    CHECK(l1 < 1e-3);

    // Saturation mass equals the saturation-profile sum (sigma).
    const auto prof = saturation_profile(fr, rho, fr.R_max);
    double psum = 0.0;
    for (double v : prof) psum += v;
    CHECK(s2.mass == doctest::Approx(psum).epsilon(1e-8));

    // Tower whose branches are not iterates of the supplied map.
    CHECK_THROWS_AS(saturate_measure(fr, rho, Map1D::logistic(), 256), TowerMapMismatch);
}

TEST_CASE("saturation of the logistic tower hits the arcsine density") {
    const auto u = ulam_tower();
    const auto rho = solve_invariant_density(u, 4096);
    const auto s = saturate_measure(u, rho, Map1D::logistic(), 4096);
    CHECK(s.mass == doctest::Approx(1.0).epsilon(1e-8));
    double l1 = 0.0;
    for (int i = 0; i < 4096; ++i) {
        const double x = s.measure.cell_center(0, i);
        const double target = 1.0 / (M_PI * std::sqrt(x * (1.0 - x))) / 4096;
        l1 += std::fabs(s.measure.weights[static_cast<std::size_t>(i)] - target);
    }
    CHECK(l1 < 1e-2);
}

TEST_CASE("induced lyapunov relation") {
    const auto d = first_return_tower(Map1D::doubling(), {0.0, 1.0}, 8, 1e-10);
    const auto rd = induced_lyapunov_check(d, solve_invariant_density(d, 512), Map1D::doubling(),
                                           0.3, 200000, 51);
    CHECK(rd.sigma == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rd.lambda_induced == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(rd.defect < 1e-9);

    const auto fr = first_return_tower(Map1D::doubling(), {0.0, 0.5}, 40, 1e-12);
    const auto rf = induced_lyapunov_check(fr, solve_invariant_density(fr, 1024),
                                           Map1D::doubling(), 0.3, 1000000, 52);
    CHECK(rf.sigma == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(rf.lambda_induced == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-3));
    CHECK(rf.defect < 1e-3);
}

TEST_CASE("pesin defect") {
    const auto d = first_return_tower(Map1D::doubling(), {0.0, 1.0}, 8, 1e-10);
    CHECK(pesin_defect(Map1D::doubling(), d, solve_invariant_density(d, 512), 0.3, 200000, 61) <
          1e-6);

    const auto fr = first_return_tower(Map1D::doubling(), {0.0, 0.5}, 40, 1e-12);
    CHECK(pesin_defect(Map1D::doubling(), fr, solve_invariant_density(fr, 1024), 0.3, 500000, 62) <
          1e-3);
}

TEST_CASE("basins of distinct starting points agree weak*") {
    // Physical-measure basin property: two generic starts give close
    // histograms.  With n samples in g cells the expected L1 gap scales
    // like sqrt(g/n); tolerance set to 5*sqrt(g/n).
    const int grid = 64;
    const long long n = 1000000;
    const auto a = empirical_measure_1d(Map1D::logistic(), 0.2345, 1000, n, grid, 0.0, 1.0, 71);
    const auto b = empirical_measure_1d(Map1D::logistic(), 0.7712, 1000, n, grid, 0.0, 1.0, 72);
    double l1 = 0.0;
    for (int i = 0; i < grid; ++i)
        l1 += std::fabs(a.weights[static_cast<std::size_t>(i)] -
                        b.weights[static_cast<std::size_t>(i)]);
    CHECK(l1 < 5.0 * std::sqrt(static_cast<double>(grid) / n));
}

TEST_CASE("measure csv is dense and ordered") {
    const auto m = empirical_measure_1d(Map1D::logistic(), 0.2, 10, 1000, 8, 0.0, 1.0, 81);
    const auto csv = measure_to_csv(m);
    CHECK(csv.find("cell_x,cell_y,weight") == 0);
    // 8 cells + header -> 9 newline-terminated lines
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}
