#include "ergodic/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ergodic/errors.hpp"

namespace ergodic {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    cfg.text_ = text;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0, instance = -1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw OutOfRange(origin + ":" + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            ++instance;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw OutOfRange(origin + ":" + std::to_string(lineno) + ": expected key = value");
        ConfigEntry e;
        e.section = section;
        e.instance = instance;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = lineno;
        if (e.key.empty())
            throw OutOfRange(origin + ":" + std::to_string(lineno) + ": empty key");
        cfg.entries_.push_back(e);
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const ConfigEntry& e) {
        return e.section == section && e.key == key;
    });
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
        if (it->section == section && it->key == key) return it->value;
    return fallback;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw OutOfRange(key + ": not a number: " + v);
    return x;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw OutOfRange(key + ": not an integer: " + v);
    return x;
}

std::vector<double> Config::get_doubles(const std::string& section,
                                        const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(get(section, key, ""));
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        const double x = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw OutOfRange(key + ": not a number: " + tok);
        out.push_back(x);
    }
    return out;
}

std::vector<std::uint64_t> Config::get_uints(const std::string& section,
                                             const std::string& key) const {
    std::vector<std::uint64_t> out;
    std::istringstream in(get(section, key, ""));
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        const unsigned long long x = std::strtoull(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0')
            throw OutOfRange(key + ": not an unsigned integer: " + tok);
        out.push_back(x);
    }
    return out;
}

void Config::restrict_keys(const std::string& section,
                           const std::vector<std::string>& allowed) const {
    for (const auto& e : entries_) {
        if (e.section != section) continue;
        if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
            throw UnknownKey(origin_ + ":" + std::to_string(e.line) + ": [" + section + "] " +
                             e.key);
    }
}

void Config::restrict_sections(const std::vector<std::string>& allowed) const {
    for (const auto& e : entries_) {
        if (std::find(allowed.begin(), allowed.end(), e.section) == allowed.end())
            throw UnknownKey(origin_ + ":" + std::to_string(e.line) + ": section [" + e.section +
                             "]");
    }
}

} // namespace ergodic
