#include "ergodic/tower_io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "ergodic/config.hpp"
#include "ergodic/errors.hpp"

namespace ergodic {

namespace {

BranchMap parse_branch_map(const std::string& value) {
    std::istringstream in(value);
    std::string kind;
    in >> kind;
    if (kind == "affine") {
        double a = 0.0, b = 0.0;
        if (!(in >> a >> b)) throw OutOfRange("map = affine needs two coefficients: " + value);
        if (a == 0.0) throw OutOfRange("affine branch map must be invertible: " + value);
        return BranchMap::affine(a, b);
    }
    if (kind == "model") {
        std::string name;
        if (!(in >> name)) throw OutOfRange("map = model needs a map name: " + value);
        std::vector<double> nums;
        double v;
        while (in >> v) nums.push_back(v);
        const bool takes_param = (name == "tent" || name == "quadratic");
        double param = 0.0;
        int tau = 1;
        if (takes_param) {
            if (nums.size() != 2) throw OutOfRange("map = model " + name + " needs <param> <tau>");
            param = nums[0];
            tau = static_cast<int>(nums[1]);
        } else {
            if (nums.size() != 1) throw OutOfRange("map = model " + name + " needs <tau>");
            tau = static_cast<int>(nums[0]);
        }
        if (tau < 1) throw OutOfRange("branch iteration count must be >= 1");
        return BranchMap::iterated(Map1D::from_name(name, param), tau);
    }
    throw OutOfRange("unknown branch map kind: " + value);
}

} // namespace

GibbsMarkovTower parse_tower(const std::string& text, const std::string& origin) {
    const Config cfg = Config::parse_string(text, origin);
    cfg.restrict_sections({"tower", "budget", "branch"});
    cfg.restrict_keys("tower", {"name", "base", "R_max", "unassigned_mass", "source_map"});
    cfg.restrict_keys("budget", {"C", "beta", "C0", "C1", "C2", "fitted"});
    cfg.restrict_keys("branch", {"domain", "return_time", "map", "jacobian"});

    GibbsMarkovTower tower;
    tower.name = cfg.get("tower", "name", "tower");
    const auto base = cfg.get_doubles("tower", "base");
    if (!base.empty()) {
        if (base.size() != 2 || !(base[0] < base[1]))
            throw OutOfRange(origin + ": base needs two increasing endpoints");
        tower.base = {base[0], base[1]};
    }
    tower.R_max = static_cast<int>(cfg.get_int("tower", "R_max", 64));
    if (tower.R_max < 1) throw OutOfRange(origin + ": R_max must be >= 1");
    tower.unassigned_mass = cfg.get_double("tower", "unassigned_mass", 0.0);
    if (tower.unassigned_mass < 0.0) throw OutOfRange(origin + ": unassigned_mass must be >= 0");
    if (cfg.has("tower", "source_map")) {
        std::istringstream in(cfg.get("tower", "source_map", ""));
        std::string name;
        double param = 0.0;
        in >> name >> param;
        tower.source_map = Map1D::from_name(name, param);
    }

    // Group branch entries by section instance so each [branch] header
    // starts a fresh branch.
    std::map<int, std::map<std::string, ConfigEntry>> groups;
    bool has_budget = false;
    for (const auto& e : cfg.entries()) {
        if (e.section == "budget") has_budget = true;
        if (e.section != "branch") continue;
        auto& g = groups[e.instance];
        if (g.count(e.key))
            throw OutOfRange(origin + ":" + std::to_string(e.line) + ": duplicate branch key " +
                             e.key);
        g[e.key] = e;
    }
    for (const auto& [inst, g] : groups) {
        (void)inst;
        Branch br;
        if (!g.count("domain") || !g.count("map"))
            throw OutOfRange(origin + ": branch needs domain and map");
        {
            std::istringstream in(g.at("domain").value);
            double lo = 0.0, hi = 0.0;
            if (!(in >> lo >> hi) || !(lo < hi))
                throw OutOfRange(origin + ":" + std::to_string(g.at("domain").line) +
                                 ": domain needs two increasing endpoints");
            br.domain = {lo, hi};
        }
        br.map = parse_branch_map(g.at("map").value);
        if (g.count("return_time")) {
            std::istringstream in(g.at("return_time").value);
            if (!(in >> br.return_time) || br.return_time < 1)
                throw OutOfRange(origin + ": return_time must be a positive integer");
        } else if (br.map.kind == BranchMap::Kind::IteratedModel) {
            br.return_time = br.map.iterations;
        }
        if (g.count("jacobian")) {
            std::istringstream in(g.at("jacobian").value);
            std::string mode;
            in >> mode;
            if (mode == "derived") {
                br.jacobian_const = false;
            } else if (mode == "const") {
                double v = 0.0;
                if (!(in >> v) || v <= 0.0)
                    throw NonpositiveJacobian(origin + ": jacobian = const needs a positive value");
                br.jacobian_const = true;
                br.jacobian_value = v;
            } else {
                throw OutOfRange(origin + ": jacobian must be 'derived' or 'const <value>'");
            }
        }
        if (br.return_time > tower.R_max)
            throw OutOfRange(origin + ": branch return time exceeds R_max");
        tower.branches.push_back(br);
    }
    if (tower.branches.empty()) throw OutOfRange(origin + ": tower has no branches");

    // All model branches must iterate the same map; remember it so orbit
    // estimators can be checked against the tower.
    for (const auto& br : tower.branches)
        if (br.map.kind == BranchMap::Kind::IteratedModel) {
            if (tower.source_map && (tower.source_map->name() != br.map.model->name() ||
                                     tower.source_map->param() != br.map.model->param()))
                throw TowerMapMismatch("branches iterate different model maps");
            if (!tower.source_map) tower.source_map = br.map.model;
        }

    if (has_budget) {
        tower.budget.C = cfg.get_double("budget", "C", 0.0);
        tower.budget.beta = cfg.get_double("budget", "beta", 0.5);
        tower.budget.C0 = cfg.get_double("budget", "C0", tower.budget.C);
        tower.budget.C1 = cfg.get_double("budget", "C1", 1.0);
        tower.budget.C2 = cfg.get_double("budget", "C2", 1.0);
        tower.budget.fitted = cfg.get_int("budget", "fitted", 0) != 0;
        tower.budget.check();
    } else {
        tower.budget = fit_budget(tower, 0.5, 32);
    }
    return tower;
}

GibbsMarkovTower load_tower(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_tower(ss.str(), path);
}

std::string serialize_tower(const GibbsMarkovTower& tower) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "[tower]\n";
    out << "name = " << tower.name << "\n";
    out << "base = " << tower.base.lo << " " << tower.base.hi << "\n";
    out << "R_max = " << tower.R_max << "\n";
    out << "unassigned_mass = " << tower.unassigned_mass << "\n";
    if (tower.source_map)
        out << "source_map = " << tower.source_map->name() << " " << tower.source_map->param()
            << "\n";
    out << "\n[budget]\n";
    out << "C = " << tower.budget.C << "\n";
    out << "beta = " << tower.budget.beta << "\n";
    out << "C0 = " << tower.budget.C0 << "\n";
    out << "C1 = " << tower.budget.C1 << "\n";
    out << "C2 = " << tower.budget.C2 << "\n";
    out << "fitted = " << (tower.budget.fitted ? 1 : 0) << "\n";
    for (const auto& br : tower.branches) {
        out << "\n[branch]\n";
        out << "domain = " << br.domain.lo << " " << br.domain.hi << "\n";
        out << "return_time = " << br.return_time << "\n";
        if (br.map.kind == BranchMap::Kind::Affine) {
            out << "map = affine " << br.map.a << " " << br.map.b << "\n";
        } else {
            const Map1D& m = *br.map.model;
            out << "map = model " << m.name();
            if (m.kind() == Map1D::Kind::Tent || m.kind() == Map1D::Kind::Quadratic)
                out << " " << m.param();
            out << " " << br.map.iterations << "\n";
        }
        if (br.jacobian_const)
            out << "jacobian = const " << br.jacobian_value << "\n";
        else
            out << "jacobian = derived\n";
    }
    return out.str();
}

void save_tower(const GibbsMarkovTower& tower, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MissingFile(path);
    out << serialize_tower(tower);
}

} // namespace ergodic
