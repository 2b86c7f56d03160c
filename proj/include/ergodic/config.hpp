#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ergodic {

// Flat sectioned key-value document.  Parsing is strict: consumers list
// the keys they understand per section and anything else is an error
// naming the offending line.
struct ConfigEntry {
    std::string section;
    int instance = 0; // ordinal of the section header this entry sits under
    std::string key;
    std::string value;
    int line = 0;
};

class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    const std::vector<ConfigEntry>& entries() const { return entries_; }

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key, long long fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
    std::vector<std::uint64_t> get_uints(const std::string& section, const std::string& key) const;

    // Throws UnknownKey if any entry in `section` has a key outside `allowed`.
    void restrict_keys(const std::string& section, const std::vector<std::string>& allowed) const;
    // Throws UnknownKey if any section outside `allowed` appears.
    void restrict_sections(const std::vector<std::string>& allowed) const;

    std::string origin() const { return origin_; }
    std::string text() const { return text_; }

  private:
    std::vector<ConfigEntry> entries_;
    std::string origin_;
    std::string text_;
};

} // namespace ergodic
