// Batch front end: tower / model / srb / sweep subcommands emitting JSON
// and CSV artifacts with embedded configuration and seeds.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "ergodic/config.hpp"
#include "ergodic/empirical.hpp"
#include "ergodic/errors.hpp"
#include "ergodic/estimators.hpp"
#include "ergodic/first_return.hpp"
#include "ergodic/henon.hpp"
#include "ergodic/prng.hpp"
#include "ergodic/sweeps.hpp"
#include "ergodic/tower.hpp"
#include "ergodic/tower_io.hpp"
#include "ergodic/wasserstein.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using json = nlohmann::ordered_json;
using namespace ergodic;

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::string resolve_out(const std::string& path) {
    if (path.empty()) return path;
    const char* dir = std::getenv("ERGO_OUT_DIR");
    if (dir && *dir && std::filesystem::path(path).is_relative())
        return (std::filesystem::path(dir) / path).string();
    return path;
}

void write_file(const std::string& path, const std::string& text) {
    const std::string full = resolve_out(path);
    const auto parent = std::filesystem::path(full).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(full);
    if (!out) throw MissingFile("cannot open for writing: " + full);
    out << text;
}

// Payload (everything except "metadata") is fully deterministic for a
// fixed config and seed; wall-clock info lives only under "metadata".
void emit(const std::string& command, const json& config, std::uint64_t seed,
          const json& results, const std::string& out_path) {
    json doc;
    doc["tool_version"] = kToolVersion;
    doc["command"] = command;
    doc["config"] = config;
    doc["seed"] = seed;
    doc["prng"] = Xoshiro256pp::name();
    doc["results"] = results;
    doc["metadata"]["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_file(out_path, text);
}

json validation_to_json(const ValidationReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"axiom", c.axiom}, {"pass", c.pass}, {"margin", c.margin}});
    return {{"checks", checks}, {"all_pass", rep.all_pass()}};
}

json density_to_json(const QuotientDensity& rho, bool include_values) {
    json j = {{"base", {rho.base.lo, rho.base.hi}},
              {"grid", rho.grid},
              {"residual", rho.residual},
              {"iterations", rho.iterations}};
    if (include_values) j["values"] = rho.values;
    return j;
}

json stats_to_json(const ReturnTimeStats& st, int tail_n) {
    json hist = json::object();
    for (const auto& [tau, mass] : st.histogram) hist[std::to_string(tau)] = mass;
    return {{"histogram", hist},
            {"sigma", st.sigma},
            {"truncated_mass", st.truncated_mass},
            {"tail_N", tail_n},
            {"tail", st.tail(tail_n)}};
}

Map1D make_map(const std::string& name, double param) { return Map1D::from_name(name, param); }

// Whitespace-separated numbers in a single argument, so values with
// leading minus signs don't fight the flag parser.
std::vector<double> split_doubles(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw OutOfRange("bad number '" + tok + "' in list argument");
        }
    }
    return out;
}

TrappingRegion parse_polygon(const std::vector<double>& coords) {
    if (coords.size() < 6 || coords.size() % 2 != 0)
        throw OutOfRange("polygon needs an even number of coordinates, at least 3 points");
    TrappingRegion region;
    for (std::size_t i = 0; i < coords.size(); i += 2)
        region.polygon.push_back({coords[i], coords[i + 1]});
    return region;
}

SweepSpec sweep_spec_from_config(const Config& cfg) {
    cfg.restrict_sections({"sweep"});
    cfg.restrict_keys("sweep", {"family", "base_param", "secondary", "deltas", "seeds", "n",
                                "burn_in", "grid", "distance", "n_directions"});
    SweepSpec spec;
    spec.family = cfg.get("sweep", "family", spec.family);
    spec.base_param = cfg.get_double("sweep", "base_param", spec.base_param);
    spec.secondary = cfg.get_double("sweep", "secondary", spec.secondary);
    if (cfg.has("sweep", "deltas")) spec.deltas = cfg.get_doubles("sweep", "deltas");
    if (cfg.has("sweep", "seeds")) spec.seeds = cfg.get_uints("sweep", "seeds");
    spec.n = cfg.get_int("sweep", "n", spec.n);
    spec.burn_in = cfg.get_int("sweep", "burn_in", spec.burn_in);
    spec.grid = static_cast<int>(cfg.get_int("sweep", "grid", spec.grid));
    spec.distance = cfg.get("sweep", "distance", spec.distance);
    spec.n_directions = static_cast<int>(cfg.get_int("sweep", "n_directions", spec.n_directions));
    spec.validate();
    return spec;
}

json sweep_spec_to_json(const SweepSpec& spec) {
    return {{"family", spec.family},     {"base_param", spec.base_param},
            {"secondary", spec.secondary}, {"deltas", spec.deltas},
            {"seeds", spec.seeds},       {"n", spec.n},
            {"burn_in", spec.burn_in},   {"grid", spec.grid},
            {"distance", spec.distance}, {"n_directions", spec.n_directions}};
}

struct ExitWithCode {
    int code;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergodic-theory toolkit: towers, model maps, SRB estimation, sweeps"};
    app.require_subcommand(1);
    int jobs = 0;
    app.add_option("--jobs", jobs, "cap the number of worker threads (0 = hardware default)");

    // ---- shared option state ------------------------------------------------
    std::string tower_path, tower_b_path, out_path, csv_path, config_path, tower_out_path;
    std::string map_name = "doubling";
    double param = 2.0;
    double a = 1.4, b = 0.3;
    double x0 = 0.1234, z0x = 0.0, z0y = 0.0;
    double tol = 1e-10, min_branch_len = 1e-12, arc_length = 2.0;
    double base_lo = 0.0, base_hi = 1.0;
    double lo_x = -1.9, hi_x = 1.9, lo_y = -0.6, hi_y = 0.6;
    long long n = 1000000, burn_in = 1000;
    int grid = 4096, max_iter = 100000, samples = 64, R_max = 64, renorm_every = 10;
    int n_points = 512, n_steps = 100, n_interior = 10000, n_boundary = 2000;
    int tail_n = 5, N = 5, depth = 1, n_directions = 8, k_deep = 3, n_samples = 100000;
    std::uint64_t seed = 1;
    bool cesaro = false, against_reference = false, no_values = false;
    std::string polygon_str, thetas_str;

    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out_path, "output JSON path"); };

    // ---- tower --------------------------------------------------------------
    auto* tower = app.add_subcommand("tower", "tower construction and spectral analysis");
    tower->require_subcommand(1);

    auto* t_validate = tower->add_subcommand("validate", "check the tower axioms");
    t_validate->add_option("--tower", tower_path, "tower definition file")->required();
    t_validate->add_option("--samples", samples, "samples per branch");
    add_out(t_validate);

    auto* t_solve = tower->add_subcommand("solve", "invariant quotient density");
    t_solve->add_option("--tower", tower_path)->required();
    t_solve->add_option("--grid", grid);
    t_solve->add_option("--tol", tol);
    t_solve->add_option("--max-iter", max_iter);
    t_solve->add_flag("--cesaro", cesaro, "average iterates instead of plain power iteration");
    t_solve->add_flag("--no-values", no_values, "omit the density values from the JSON");
    add_out(t_solve);

    auto* t_entropy = tower->add_subcommand("entropy", "entropy via the return-time formula");
    t_entropy->add_option("--tower", tower_path)->required();
    t_entropy->add_option("--grid", grid);
    t_entropy->add_option("--tol", tol);
    t_entropy->add_flag("--against-reference", against_reference,
                        "integrate log JF against the reference measure instead of rho dm");
    add_out(t_entropy);

    auto* t_stats = tower->add_subcommand("stats", "return-time histogram, sigma and tails");
    t_stats->add_option("--tower", tower_path)->required();
    t_stats->add_option("--grid", grid);
    t_stats->add_option("--tail-n", tail_n, "N for the weighted tail sum");
    add_out(t_stats);

    // ---- model --------------------------------------------------------------
    auto* model = app.add_subcommand("model", "concrete maps: orbits, fixed points, towers");
    model->require_subcommand(1);

    auto* m_orbit = model->add_subcommand("orbit", "iterate a map and record the orbit");
    m_orbit->add_option("--map", map_name, "doubling|tent|logistic|quadratic|henon");
    m_orbit->add_option("--param", param, "tent slope / quadratic coefficient");
    m_orbit->add_option("--a", a);
    m_orbit->add_option("--b", b);
    m_orbit->add_option("--x0", x0);
    m_orbit->add_option("--z0x", z0x);
    m_orbit->add_option("--z0y", z0y);
    m_orbit->add_option("--n", n);
    m_orbit->add_option("--seed", seed);
    add_out(m_orbit);

    auto* m_fixed = model->add_subcommand("fixed-point", "Henon fixed point and eigendata");
    m_fixed->add_option("--a", a);
    m_fixed->add_option("--b", b);
    add_out(m_fixed);

    auto* m_trap = model->add_subcommand("trap-check", "verify a forward-invariant polygon");
    m_trap->add_option("--a", a);
    m_trap->add_option("--b", b);
    m_trap->add_option("--polygon", polygon_str,
                       "\"x y x y ...\" (default: shipped quadrilateral)");
    m_trap->add_option("--n-interior", n_interior);
    m_trap->add_option("--n-boundary", n_boundary);
    m_trap->add_option("--n-steps", n_steps);
    m_trap->add_option("--seed", seed);
    m_trap->add_option("--config", config_path, "config file with a [trap] polygon");
    add_out(m_trap);

    auto* m_manifold = model->add_subcommand("manifold", "trace the unstable manifold of z*");
    m_manifold->add_option("--a", a);
    m_manifold->add_option("--b", b);
    m_manifold->add_option("--arc-length", arc_length);
    m_manifold->add_option("--n-points", n_points);
    add_out(m_manifold);

    auto* m_build = model->add_subcommand("build-tower", "first-return tower for a 1D map");
    m_build->add_option("--map", map_name)->required();
    m_build->add_option("--param", param);
    m_build->add_option("--base-lo", base_lo);
    m_build->add_option("--base-hi", base_hi);
    m_build->add_option("--r-max", R_max);
    m_build->add_option("--min-branch-len", min_branch_len);
    m_build->add_option("--tower-out", tower_out_path, "tower definition file to write");
    add_out(m_build);

    // ---- srb ----------------------------------------------------------------
    auto* srb = app.add_subcommand("srb", "SRB-measure estimators");
    srb->require_subcommand(1);

    auto* s_measure = srb->add_subcommand("measure", "empirical histogram of a long orbit");
    s_measure->add_option("--map", map_name, "doubling|tent|logistic|quadratic|henon");
    s_measure->add_option("--param", param);
    s_measure->add_option("--a", a);
    s_measure->add_option("--b", b);
    s_measure->add_option("--x0", x0);
    s_measure->add_option("--z0x", z0x);
    s_measure->add_option("--z0y", z0y);
    s_measure->add_option("--burn-in", burn_in);
    s_measure->add_option("--n", n);
    s_measure->add_option("--grid", grid);
    auto* s_measure_lox = s_measure->add_option("--lo-x", lo_x);
    auto* s_measure_hix = s_measure->add_option("--hi-x", hi_x);
    s_measure->add_option("--lo-y", lo_y);
    s_measure->add_option("--hi-y", hi_y);
    s_measure->add_option("--seed", seed);
    s_measure->add_option("--csv", csv_path, "also write the histogram as CSV");
    add_out(s_measure);

    auto* s_lyap = srb->add_subcommand("lyapunov", "Lyapunov spectrum along an orbit");
    s_lyap->add_option("--map", map_name);
    s_lyap->add_option("--param", param);
    s_lyap->add_option("--a", a);
    s_lyap->add_option("--b", b);
    s_lyap->add_option("--x0", x0);
    s_lyap->add_option("--z0x", z0x);
    s_lyap->add_option("--z0y", z0y);
    s_lyap->add_option("--n", n);
    s_lyap->add_option("--renorm-every", renorm_every);
    s_lyap->add_option("--seed", seed);
    add_out(s_lyap);

    auto* s_saturate = srb->add_subcommand("saturate", "push the tower measure up the levels");
    s_saturate->add_option("--tower", tower_path)->required();
    s_saturate->add_option("--map", map_name)->required();
    s_saturate->add_option("--param", param);
    s_saturate->add_option("--grid", grid);
    s_saturate->add_option("--csv", csv_path);
    add_out(s_saturate);

    auto* s_pesin = srb->add_subcommand("pesin", "entropy vs largest exponent");
    s_pesin->add_option("--tower", tower_path)->required();
    s_pesin->add_option("--map", map_name)->required();
    s_pesin->add_option("--param", param);
    s_pesin->add_option("--x0", x0);
    s_pesin->add_option("--n", n);
    s_pesin->add_option("--grid", grid);
    s_pesin->add_option("--seed", seed);
    add_out(s_pesin);

    // ---- sweep --------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "parameter sweeps and uniformity diagnostics");
    sweep->require_subcommand(1);

    auto* w_stability = sweep->add_subcommand("stability", "statistical-stability sweep");
    w_stability->add_option("--config", config_path, "sweep config file")->required();
    w_stability->add_option("--out", out_path, "CSV output path");
    w_stability->add_option("--summary", csv_path, "JSON summary path");

    auto* w_entropy = sweep->add_subcommand("entropy", "entropy along a 1D family");
    w_entropy->add_option("--family", map_name, "bernoulli|tent")->required();
    w_entropy->add_option("--thetas", thetas_str, "\"t1 t2 ...\" parameter values")->required();
    w_entropy->add_option("--grid", grid);
    w_entropy->add_option("--n", n);
    w_entropy->add_option("--seed", seed);
    w_entropy->add_option("--csv", csv_path);
    add_out(w_entropy);

    auto* w_uniformity = sweep->add_subcommand("uniformity", "U2/U4/U5 diagnostics");
    w_uniformity->add_option("--tower", tower_path, "perturbed tower")->required();
    w_uniformity->add_option("--reference", tower_b_path, "reference tower")->required();
    w_uniformity->add_option("--N", N);
    w_uniformity->add_option("--depth", depth);
    add_out(w_uniformity);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#endif

    try {
        // ---- tower ----------------------------------------------------------
        if (t_validate->parsed()) {
            const auto t = load_tower(tower_path);
            const auto rep = validate_tower(t, samples);
            emit("tower validate",
                 {{"tower", tower_path}, {"samples", samples}, {"name", t.name}}, 0,
                 validation_to_json(rep), out_path);
            return rep.all_pass() ? 0 : 1;
        }
        if (t_solve->parsed()) {
            const auto t = load_tower(tower_path);
            SolveOptions opts;
            opts.tol = tol;
            opts.max_iter = max_iter;
            opts.cesaro = cesaro;
            const auto rho = solve_invariant_density(t, grid, opts);
            emit("tower solve",
                 {{"tower", tower_path},
                  {"grid", grid},
                  {"tol", tol},
                  {"max_iter", max_iter},
                  {"cesaro", cesaro}},
                 0, density_to_json(rho, !no_values), out_path);
            return 0;
        }
        if (t_entropy->parsed()) {
            const auto t = load_tower(tower_path);
            SolveOptions opts;
            opts.tol = tol;
            const auto rho = solve_invariant_density(t, grid, opts);
            const auto st = return_time_stats(t, rho);
            const double h = entropy(t, rho, {against_reference});
            emit("tower entropy",
                 {{"tower", tower_path},
                  {"grid", grid},
                  {"tol", tol},
                  {"against_reference", against_reference}},
                 0,
                 {{"entropy", h},
                  {"sigma", st.sigma},
                  {"density", density_to_json(rho, false)}},
                 out_path);
            return 0;
        }
        if (t_stats->parsed()) {
            const auto t = load_tower(tower_path);
            const auto rho = solve_invariant_density(t, grid);
            const auto st = return_time_stats(t, rho);
            emit("tower stats", {{"tower", tower_path}, {"grid", grid}, {"tail_n", tail_n}}, 0,
                 stats_to_json(st, tail_n), out_path);
            return 0;
        }

        // ---- model ----------------------------------------------------------
        if (m_orbit->parsed()) {
            json results;
            json cfg = {{"map", map_name}, {"n", n}, {"seed", seed}};
            if (map_name == "henon") {
                cfg["a"] = a;
                cfg["b"] = b;
                cfg["z0"] = {z0x, z0y};
                const auto orbit = HenonMap{a, b}.orbit({z0x, z0y}, static_cast<int>(n));
                json pts = json::array();
                for (const auto& z : orbit) pts.push_back({z.x, z.y});
                results["points"] = pts;
            } else {
                const auto map = make_map(map_name, param);
                cfg["param"] = param;
                cfg["x0"] = x0;
                OrbitSampler sampler(map, x0, seed);
                json pts = json::array();
                pts.push_back(sampler.current());
                for (long long i = 0; i < n; ++i) pts.push_back(sampler.step());
                results["points"] = pts;
            }
            emit("model orbit", cfg, seed, results, out_path);
            return 0;
        }
        if (m_fixed->parsed()) {
            const auto fp = henon_fixed_point({a, b});
            emit("model fixed-point", {{"a", a}, {"b", b}}, 0,
                 {{"z_star", {fp.z_star.x, fp.z_star.y}},
                  {"unstable_eigenvalue", fp.unstable_eigenvalue},
                  {"stable_eigenvalue", fp.stable_eigenvalue},
                  {"unstable_direction", {fp.unstable_direction.x, fp.unstable_direction.y}}},
                 out_path);
            return 0;
        }
        if (m_trap->parsed()) {
            TrappingRegion region = default_henon_trap();
            if (!polygon_str.empty()) region = parse_polygon(split_doubles(polygon_str));
            if (!config_path.empty()) {
                const auto cfg = Config::parse_file(config_path);
                cfg.restrict_keys("trap", {"polygon"});
                if (cfg.has("trap", "polygon"))
                    region = parse_polygon(cfg.get_doubles("trap", "polygon"));
            }
            json poly = json::array();
            for (const auto& p : region.polygon) poly.push_back({p.x, p.y});
            const auto rep = trapping_region_check({a, b}, region, n_boundary, n_interior,
                                                   n_steps, seed);
            emit("model trap-check",
                 {{"a", a},
                  {"b", b},
                  {"polygon", poly},
                  {"n_interior", n_interior},
                  {"n_boundary", n_boundary},
                  {"n_steps", n_steps}},
                 seed,
                 {{"pass", rep.pass},
                  {"n_checked", rep.n_checked},
                  {"n_escaped", rep.n_escaped},
                  {"min_distance", rep.min_distance}},
                 out_path);
            return rep.pass ? 0 : 1;
        }
        if (m_manifold->parsed()) {
            const auto pts = unstable_manifold_segment({a, b}, arc_length, n_points);
            json poly = json::array();
            for (const auto& p : pts) poly.push_back({p.x, p.y});
            emit("model manifold",
                 {{"a", a}, {"b", b}, {"arc_length", arc_length}, {"n_points", n_points}}, 0,
                 {{"points", poly}}, out_path);
            return 0;
        }
        if (m_build->parsed()) {
            const auto map = make_map(map_name, param);
            const auto t = first_return_tower(map, {base_lo, base_hi}, R_max, min_branch_len);
            if (!tower_out_path.empty()) write_file(tower_out_path, serialize_tower(t));
            json hist = json::object();
            std::map<int, int> counts;
            for (const auto& br : t.branches) counts[br.return_time]++;
            for (const auto& [tau, c] : counts) hist[std::to_string(tau)] = c;
            emit("model build-tower",
                 {{"map", map_name},
                  {"param", param},
                  {"base", {base_lo, base_hi}},
                  {"R_max", R_max},
                  {"min_branch_len", min_branch_len},
                  {"tower_out", tower_out_path}},
                 0,
                 {{"branches", t.branches.size()},
                  {"branches_per_return_time", hist},
                  {"unassigned_mass", t.unassigned_mass},
                  {"note", t.note},
                  {"budget",
                   {{"C", t.budget.C},
                    {"beta", t.budget.beta},
                    {"C0", t.budget.C0},
                    {"C1", t.budget.C1},
                    {"C2", t.budget.C2},
                    {"fitted", t.budget.fitted}}}},
                 out_path);
            return 0;
        }

        // ---- srb ------------------------------------------------------------
        if (s_measure->parsed()) {
            EmpiricalMeasure m;
            json cfg = {{"map", map_name}, {"burn_in", burn_in}, {"n", n},
                        {"grid", grid},    {"seed", seed}};
            if (map_name == "henon") {
                cfg["a"] = a;
                cfg["b"] = b;
                cfg["z0"] = {z0x, z0y};
                cfg["bounds"] = {lo_x, hi_x, lo_y, hi_y};
                m = empirical_measure_2d({a, b}, {z0x, z0y}, burn_in, n, grid, grid, lo_x, hi_x,
                                         lo_y, hi_y, seed);
            } else {
                const auto map = make_map(map_name, param);
                // Bounds default to the map's own domain unless given.
                const double l = s_measure_lox->count() > 0 ? lo_x : map.domain().lo;
                const double h = s_measure_hix->count() > 0 ? hi_x : map.domain().hi;
                cfg["param"] = param;
                cfg["x0"] = x0;
                cfg["bounds"] = {l, h};
                m = empirical_measure_1d(map, x0, burn_in, n, grid, l, h, seed);
            }
            if (!csv_path.empty()) write_file(csv_path, measure_to_csv(m));
            emit("srb measure", cfg, seed,
                 {{"dims", m.dims},
                  {"lo", {m.lo[0], m.lo[1]}},
                  {"hi", {m.hi[0], m.hi[1]}},
                  {"expanded", m.expanded},
                  {"total", m.total()},
                  {"nonzero_cells",
                   std::count_if(m.weights.begin(), m.weights.end(),
                                 [](double w) { return w > 0.0; })},
                  {"csv", csv_path}},
                 out_path);
            return 0;
        }
        if (s_lyap->parsed()) {
            LyapunovEstimate est;
            json cfg = {{"map", map_name}, {"n", n}, {"seed", seed}};
            if (map_name == "henon") {
                cfg["a"] = a;
                cfg["b"] = b;
                cfg["z0"] = {z0x, z0y};
                cfg["renorm_every"] = renorm_every;
                est = lyapunov_spectrum(HenonMap{a, b}, {z0x, z0y}, n, renorm_every, seed);
            } else {
                cfg["param"] = param;
                cfg["x0"] = x0;
                est = lyapunov_spectrum(make_map(map_name, param), x0, n, seed);
            }
            json results = {{"lambda1", est.lambda1},
                            {"dims", est.dims},
                            {"n", est.n},
                            {"ci_halfwidth", est.ci_halfwidth}};
            if (est.dims == 2) {
                results["lambda2"] = est.lambda2;
                results["sum"] = est.lambda1 + est.lambda2;
                results["log_det"] = std::log(b);
            }
            emit("srb lyapunov", cfg, seed, results, out_path);
            return 0;
        }
        if (s_saturate->parsed()) {
            const auto t = load_tower(tower_path);
            const auto map = make_map(map_name, param);
            const auto rho = solve_invariant_density(t, 4096);
            const auto sat = saturate_measure(t, rho, map, grid);
            if (!csv_path.empty()) write_file(csv_path, measure_to_csv(sat.measure));
            emit("srb saturate",
                 {{"tower", tower_path}, {"map", map_name}, {"param", param}, {"grid", grid}}, 0,
                 {{"mass", sat.mass},
                  {"total", sat.measure.total()},
                  {"lo", sat.measure.lo[0]},
                  {"hi", sat.measure.hi[0]},
                  {"csv", csv_path}},
                 out_path);
            return 0;
        }
        if (s_pesin->parsed()) {
            const auto t = load_tower(tower_path);
            const auto map = make_map(map_name, param);
            const auto rho = solve_invariant_density(t, grid);
            const double h = entropy(t, rho);
            const auto ly = lyapunov_spectrum(map, x0, n, seed);
            const double defect = pesin_defect(map, t, rho, x0, n, seed);
            emit("srb pesin",
                 {{"tower", tower_path},
                  {"map", map_name},
                  {"param", param},
                  {"x0", x0},
                  {"n", n},
                  {"grid", grid}},
                 seed, {{"entropy", h}, {"lambda1", ly.lambda1}, {"defect", defect}}, out_path);
            return 0;
        }

        // ---- sweep ----------------------------------------------------------
        if (w_stability->parsed()) {
            const auto cfg = Config::parse_file(config_path);
            const auto spec = sweep_spec_from_config(cfg);
            const auto rep = stability_sweep(spec);
            if (!out_path.empty()) write_file(out_path, rep.to_csv());
            json summary = json::object();
            for (const auto& [delta, s] : rep.summary)
                summary[std::to_string(delta)] = {
                    {"median", s.median}, {"iqr", s.iqr}, {"n_ok", s.n_ok}};
            emit("sweep stability", sweep_spec_to_json(spec),
                 spec.seeds.empty() ? 0 : spec.seeds.front(),
                 {{"rows", rep.rows.size()}, {"summary", summary}, {"csv", out_path}},
                 csv_path);
            return 0;
        }
        if (w_entropy->parsed()) {
            const auto thetas = split_doubles(thetas_str);
            const auto rep = entropy_continuity_sweep(map_name, thetas, grid, n, seed);
            if (!csv_path.empty()) write_file(csv_path, rep.to_csv());
            json rows = json::array();
            for (const auto& r : rep.rows)
                rows.push_back({{"theta", r.theta}, {"h", r.h}, {"status", r.status}});
            json modulus = json::array();
            for (const auto& [d, m] : rep.modulus) modulus.push_back({{"delta", d}, {"max", m}});
            emit("sweep entropy",
                 {{"family", map_name},
                  {"thetas", thetas},
                  {"grid", grid},
                  {"n", n},
                  {"seed", seed}},
                 seed, {{"rows", rows}, {"modulus", modulus}, {"csv", csv_path}}, out_path);
            return 0;
        }
        if (w_uniformity->parsed()) {
            const auto tn = load_tower(tower_path);
            const auto t0 = load_tower(tower_b_path);
            const auto diag = uniformity_diagnostics(tn, t0, N, depth);
            json per_time = json::object();
            for (const auto& [j, m] : diag.per_time_sym_diff) per_time[std::to_string(j)] = m;
            emit("sweep uniformity",
                 {{"tower", tower_path}, {"reference", tower_b_path}, {"N", N}, {"depth", depth}},
                 0,
                 {{"sym_diff_base_mass", diag.sym_diff_base_mass},
                  {"per_time_sym_diff", per_time},
                  {"deep_sym_diff", diag.deep_sym_diff},
                  {"tail_n", diag.tail_n},
                  {"tail_0", diag.tail_0}},
                 out_path);
            return 0;
        }
        return 2;
    } catch (const UnknownKey& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const OutOfRange& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const MissingFile& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
