#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin() {
    const char* b = std::getenv("ERGO_BIN");
    REQUIRE(b != nullptr);
    return b;
}

std::string data() {
    const char* d = std::getenv("ERGO_DATA");
    REQUIRE(d != nullptr);
    return d;
}

fs::path work_dir() {
    static fs::path dir = [] {
        auto p = fs::temp_directory_path() / "ergo_cli_test";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = bin() + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

json load_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("tower entropy on the shipped doubling tower") {
    const auto out = work_dir() / "h.json";
    CHECK(run("tower entropy --tower " + data() + "/doubling.tower --out " + out.string()) == 0);
    const auto j = load_json(out);
    CHECK(std::fabs(j["results"]["entropy"].get<double>() - std::log(2.0)) < 1e-9);
    CHECK(j["tool_version"].is_string());
    CHECK(j["prng"].is_string());
    CHECK(j["config"].is_object());
    CHECK(j["metadata"].contains("timestamp_unix"));
}

TEST_CASE("tower validate passes on every shipped tower") {
    for (const char* t : {"doubling.tower", "bernoulli_124.tower", "ulam.tower"}) {
        const auto out = work_dir() / (std::string("v_") + t + ".json");
        CHECK(run("tower validate --tower " + data() + "/" + t + " --out " + out.string()) == 0);
        const auto j = load_json(out);
        for (const auto& c : j["results"]["checks"]) CHECK(c["pass"].get<bool>());
    }
}

TEST_CASE("tower solve reports residual and bounds") {
    const auto out = work_dir() / "solve.json";
    CHECK(run("tower solve --tower " + data() + "/ulam.tower --grid 1024 --out " + out.string()) ==
          0);
    const auto j = load_json(out);
    CHECK(j["results"]["residual"].get<double>() <= 1e-10);
    CHECK(j["results"]["values"].size() == 1024);
    CHECK(j["results"]["grid"].get<int>() == 1024);
}

TEST_CASE("tower stats reproduces the Abramov numbers") {
    const auto out = work_dir() / "stats.json";
    CHECK(run("tower stats --tower " + data() + "/bernoulli_124.tower --tail-n 2 --out " +
              out.string()) == 0);
    const auto j = load_json(out);
    CHECK(std::fabs(j["results"]["sigma"].get<double>() - 1.75) < 1e-12);
    // tail(2) = 2*0.25 + 3*0.25 = 1.25
    CHECK(std::fabs(j["results"]["tail"].get<double>() - 1.25) < 1e-12);
}

TEST_CASE("model orbit and fixed point") {
    const auto out = work_dir() / "orbit.json";
    CHECK(run("model orbit --map doubling --x0 0.2 --n 3 --out " + out.string()) == 0);
    const auto j = load_json(out);
    const auto orbit = j["results"]["points"];
    REQUIRE(orbit.size() == 4);
    CHECK(std::fabs(orbit[3].get<double>() - 0.6) < 1e-9);

    const auto fout = work_dir() / "fp.json";
    CHECK(run("model fixed-point --a 1.4 --b 0.3 --out " + fout.string()) == 0);
    const auto f = load_json(fout);
    CHECK(std::fabs(f["results"]["z_star"][0].get<double>() - 0.6313545) < 1e-7);
    CHECK(std::fabs(f["results"]["z_star"][1].get<double>() - 0.1894063) < 1e-7);
    const double prod = f["results"]["unstable_eigenvalue"].get<double>() *
                        f["results"]["stable_eigenvalue"].get<double>();
    CHECK(std::fabs(prod + 0.3) < 1e-10);

    // Divergent orbit is a numeric failure: exit 1.
    CHECK(run("model orbit --map henon --a 1.4 --b 0.3 --z0x 10 --z0y 10 --n 100 --out " +
              (work_dir() / "div.json").string()) == 1);
}

TEST_CASE("model trap-check with the default and a configured polygon") {
    const auto out = work_dir() / "trap.json";
    CHECK(run("model trap-check --a 1.4 --b 0.3 --n-interior 500 --n-boundary 500 --n-steps 100 "
              "--seed 5 --out " +
              out.string()) == 0);
    const auto j = load_json(out);
    CHECK(j["results"]["pass"].get<bool>());
    CHECK(j["results"]["n_escaped"].get<int>() == 0);

    const auto cfg = work_dir() / "trap.cfg";
    write_file(cfg, "[trap]\npolygon = -1.33 0.42 1.32 0.133 1.245 -0.14 -1.06 -0.5\n");
    CHECK(run("model trap-check --a 1.4 --b 0.3 --config " + cfg.string() +
              " --n-interior 200 --n-boundary 200 --n-steps 50 --seed 5 --out " +
              (work_dir() / "trap2.json").string()) == 0);

    // A failing region is a validation failure: exit 1.
    CHECK(run("model trap-check --a 1.4 --b 0.3 --polygon \"-50 -50 50 -50 50 50 -50 50\" "
              "--n-interior 100 --n-boundary 100 --n-steps 50 --seed 5 --out " +
              (work_dir() / "trap3.json").string()) == 1);
}

TEST_CASE("model manifold") {
    const auto out = work_dir() / "manifold.json";
    CHECK(run("model manifold --a 1.4 --b 0.3 --arc-length 1.0 --n-points 50 --out " +
              out.string()) == 0);
    const auto j = load_json(out);
    REQUIRE(j["results"]["points"].size() == 50);
    CHECK(std::fabs(j["results"]["points"][0][0].get<double>() - 0.6313545) < 1e-6);
}

TEST_CASE("model build-tower feeds tower stats") {
    const auto tower_file = work_dir() / "fr.tower";
    const auto out = work_dir() / "build.json";
    CHECK(run("model build-tower --map doubling --base-lo 0 --base-hi 0.5 --r-max 30 "
              "--min-branch-len 1e-12 --tower-out " +
              tower_file.string() + " --out " + out.string()) == 0);
    const auto j = load_json(out);
    CHECK(j["results"]["branches"].get<int>() == 30);
    CHECK(j["results"]["unassigned_mass"].get<double>() < 1e-6);

    const auto sout = work_dir() / "fr_stats.json";
    CHECK(run("tower stats --tower " + tower_file.string() + " --grid 1024 --out " +
              sout.string()) == 0);
    const auto s = load_json(sout);
    CHECK(std::fabs(s["results"]["sigma"].get<double>() - 2.0) < 1e-5);
}

TEST_CASE("srb lyapunov satisfies the determinant identity") {
    const auto out = work_dir() / "ly.json";
    CHECK(run("srb lyapunov --map henon --a 1.4 --b 0.3 --n 1000000 --seed 7 --out " +
              out.string()) == 0);
    const auto j = load_json(out);
    const double l1 = j["results"]["lambda1"].get<double>();
    const double l2 = j["results"]["lambda2"].get<double>();
    CHECK(l1 > 0.0);
    CHECK(std::fabs(l1 + l2 - std::log(0.3)) < 1e-6);
}

TEST_CASE("srb measure writes a normalized histogram with csv") {
    const auto out = work_dir() / "measure.json";
    const auto csv = work_dir() / "measure.csv";
    CHECK(run("srb measure --map logistic --x0 0.2 --burn-in 100 --n 100000 --grid 128 "
              "--seed 3 --csv " +
              csv.string() + " --out " + out.string()) == 0);
    const auto j = load_json(out);
    CHECK(std::fabs(j["results"]["total"].get<double>() - 1.0) < 1e-12);
    CHECK(!j["results"]["expanded"].get<bool>());
    const auto text = read_file(csv);
    CHECK(text.rfind("cell_x,cell_y,weight", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 129); // header + 128 cells
}

TEST_CASE("srb saturate and pesin close the loop") {
    const auto out = work_dir() / "sat.json";
    CHECK(run("srb saturate --tower " + data() + "/ulam.tower --map logistic --grid 1024 --out " +
              out.string()) == 0);
    const auto j = load_json(out);
    CHECK(std::fabs(j["results"]["mass"].get<double>() - 1.0) < 1e-8);

    const auto pout = work_dir() / "pesin.json";
    CHECK(run("srb pesin --tower " + data() + "/ulam.tower --map logistic --x0 0.2 --n 1000000 "
              "--seed 9 --out " +
              pout.string()) == 0);
    const auto p = load_json(pout);
    CHECK(p["results"]["defect"].get<double>() < 5e-3);
}

TEST_CASE("sweep stability from a config file") {
    const auto cfg = work_dir() / "tent.cfg";
    write_file(cfg, "[sweep]\n"
                    "family = tent-slope\n"
                    "base_param = 1.95\n"
                    "deltas = 0 0.01\n"
                    "seeds = 1 2\n"
                    "n = 50000\n"
                    "burn_in = 500\n"
                    "grid = 256\n"
                    "distance = w1_1d\n");
    const auto csv = work_dir() / "sweep.csv";
    const auto out = work_dir() / "sweep.json";
    CHECK(run("sweep stability --config " + cfg.string() + " --out " + csv.string() +
              " --summary " + out.string()) == 0);
    const auto text = read_file(csv);
    CHECK(text.rfind("family,param_base,delta,seed,n,distance,entropy,lambda1,status", 0) == 0);
    // one header + 4 rows
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    // delta = 0 rows have distance exactly 0
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string family, base, delta, seed, nn, dist;
        std::getline(cells, family, ',');
        std::getline(cells, base, ',');
        std::getline(cells, delta, ',');
        std::getline(cells, seed, ',');
        std::getline(cells, nn, ',');
        std::getline(cells, dist, ',');
        if (std::stod(delta) == 0.0) CHECK(std::stod(dist) == 0.0);
    }
    const auto summary = load_json(out);
    CHECK(summary["results"]["summary"].size() == 2);
}

TEST_CASE("sweep entropy matches the closed form") {
    const auto out = work_dir() / "ent.json";
    CHECK(run("sweep entropy --family bernoulli --thetas \"0.3 0.5 0.7\" --grid 1024 --out " +
              out.string()) == 0);
    const auto j = load_json(out);
    for (const auto& row : j["results"]["rows"]) {
        const double th = row["theta"].get<double>();
        const double h = (-th * std::log(th) - (1 - th) * std::log(1 - th)) / (2 - th);
        CHECK(std::fabs(row["h"].get<double>() - h) < 1e-8);
    }
}

TEST_CASE("sweep uniformity between two tower files") {
    const auto t0 = work_dir() / "u0.tower";
    const auto tn = work_dir() / "un.tower";
    CHECK(run("model build-tower --map doubling --base-lo 0 --base-hi 0.5 --r-max 30 "
              "--min-branch-len 1e-12 --tower-out " +
              t0.string() + " --out " + (work_dir() / "u0.json").string()) == 0);
    CHECK(run("model build-tower --map doubling --base-lo 0 --base-hi 0.4990234375 --r-max 30 "
              "--min-branch-len 1e-12 --tower-out " +
              tn.string() + " --out " + (work_dir() / "un.json").string()) == 0);
    const auto out = work_dir() / "uniformity.json";
    CHECK(run("sweep uniformity --tower " + tn.string() + " --reference " + t0.string() +
              " --N 6 --out " + out.string()) == 0);
    const auto j = load_json(out);
    CHECK(j["results"]["sym_diff_base_mass"].get<double>() <= std::pow(2.0, -9) + 1e-6);
    CHECK(j["results"]["tail_n"].is_number());
    CHECK(j["results"]["tail_0"].is_number());
}

TEST_CASE("config errors exit with code 2") {
    const auto bad = work_dir() / "bad.cfg";
    write_file(bad, "[sweep]\nfamily = tent-slope\nbase_param = 1.95\ndeltas = 0\nseeds = 1\n"
                    "R_maxx = 3\n");
    CHECK(run("sweep stability --config " + bad.string() + " --out " +
              (work_dir() / "bad.csv").string()) == 2);
    CHECK(run("tower entropy --tower /nonexistent.tower --out " +
              (work_dir() / "nx.json").string()) == 2);
    // beta outside (0,1) in a tower file is a range error.
    const auto badtower = work_dir() / "bad.tower";
    write_file(badtower, "[tower]\nname = bad\nbase = 0 1\nR_max = 4\n"
                         "[budget]\nC = 0\nbeta = 1.5\nC0 = 0\nC1 = 1\nC2 = 1\nfitted = 0\n"
                         "[branch]\ndomain = 0 1\nreturn_time = 1\nmap = affine 1 0\n"
                         "jacobian = derived\n");
    CHECK(run("tower validate --tower " + badtower.string() + " --out " +
              (work_dir() / "badtower.json").string()) == 2);
}

TEST_CASE("validation failures exit with code 1") {
    const auto overlap = work_dir() / "overlap.tower";
    write_file(overlap, "[tower]\nname = overlap\nbase = 0 1\nR_max = 4\n"
                        "[branch]\ndomain = 0 0.6\nreturn_time = 1\nmap = affine 1.6666666667 0\n"
                        "jacobian = derived\n"
                        "[branch]\ndomain = 0.4 1\nreturn_time = 1\nmap = affine 1.6666666667 "
                        "-0.6666666667\njacobian = derived\n");
    CHECK(run("tower validate --tower " + overlap.string() + " --out " +
              (work_dir() / "overlap.json").string()) == 1);
}

TEST_CASE("reruns are byte-identical up to the metadata block") {
    const auto o1 = work_dir() / "rep1.json";
    const auto o2 = work_dir() / "rep2.json";
    const std::string cmd = "srb lyapunov --map henon --a 1.4 --b 0.3 --n 200000 --seed 11 --out ";
    CHECK(run(cmd + o1.string()) == 0);
    CHECK(run(cmd + o2.string()) == 0);
    auto j1 = load_json(o1);
    auto j2 = load_json(o2);
    j1.erase("metadata");
    j2.erase("metadata");
    CHECK(j1.dump() == j2.dump());
}

TEST_CASE("ERGO_OUT_DIR prefixes relative output paths") {
    const auto dir = work_dir() / "outdir";
    fs::create_directories(dir);
    const std::string cmd = "ERGO_OUT_DIR=" + dir.string() + " " + bin() +
                            " tower entropy --tower " + data() +
                            "/doubling.tower --out rel.json > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir / "rel.json"));
}
