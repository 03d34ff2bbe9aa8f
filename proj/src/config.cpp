#include "jtchain/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace jt {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError("cannot parse '" + s + "' as a number for " + what);
    return v;
}

} // namespace

const std::string& ConfigSection::get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end())
        throw ConfigError("missing key '" + key + "' in section [" + name + "]");
    return it->second;
}

std::string ConfigSection::get_or(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double ConfigSection::get_double(const std::string& key) const {
    return to_double(get(key), key);
}

double ConfigSection::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int ConfigSection::get_int(const std::string& key) const {
    const double v = get_double(key);
    const int i = static_cast<int>(v + (v >= 0 ? 0.5 : -0.5));
    if (std::abs(v - i) > 1e-9)
        throw ConfigError("key '" + key + "' must be an integer, got " + get(key));
    return i;
}

int ConfigSection::get_int_or(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::vector<double> ConfigSection::get_list(const std::string& key) const {
    return parse_double_list(get(key));
}

std::vector<const ConfigSection*> ConfigFile::named(const std::string& name) const {
    std::vector<const ConfigSection*> out;
    for (const auto& s : sections)
        if (s.name == name) out.push_back(&s);
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("empty entry in list '" + text + "'");
        out.push_back(to_double(item, "list entry"));
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

ConfigFile parse_config_text(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.raw = text;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    ConfigSection* current = nullptr;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": unterminated section header");
            ConfigSection sec;
            sec.name = trim(line.substr(1, line.size() - 2));
            sec.line = lineno;
            cfg.sections.push_back(sec);
            current = &cfg.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        if (!current)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": key outside of any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (current->values.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
        current->values[key] = val;
    }
    return cfg;
}

ConfigFile parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

} // namespace jt
