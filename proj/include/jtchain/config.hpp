#pragma once

#include <map>
#include <string>
#include <vector>

#include "jtchain/errors.hpp"

namespace jt {

/// One `[name]` table of a flat key = value config file.
struct ConfigSection {
    std::string name;
    int line = 0;
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int_or(const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& key) const;
};

struct ConfigFile {
    std::vector<ConfigSection> sections;
    std::string raw; // original text, hashed into output metadata

    std::vector<const ConfigSection*> named(const std::string& name) const;
};

/// Parse `key = value` lines grouped under `[section]` headers.
/// `#` and `;` start comments; blank lines are ignored.
ConfigFile parse_config_text(const std::string& text, const std::string& origin);
ConfigFile parse_config_file(const std::string& path);

std::vector<double> parse_double_list(const std::string& text);

} // namespace jt
