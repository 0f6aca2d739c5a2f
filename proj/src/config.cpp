#include "cavitykit/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cavitykit::config {

namespace {

struct UnitDef {
    const char* suffix;
    Dim dim;
    double scale;
};

// suffix table, longest match wins so "nm" is not shadowed by "m"
const UnitDef kUnits[] = {
    {"pm", Dim::length, 1e-12},  {"nm", Dim::length, 1e-9},   {"um", Dim::length, 1e-6},
    {"mm", Dim::length, 1e-3},   {"m", Dim::length, 1.0},
    {"fs", Dim::time, 1e-15},    {"ps", Dim::time, 1e-12},    {"ns", Dim::time, 1e-9},
    {"us", Dim::time, 1e-6},     {"ms", Dim::time, 1e-3},     {"s", Dim::time, 1.0},
    {"hz", Dim::frequency, 1.0}, {"khz", Dim::frequency, 1e3},
    {"mhz", Dim::frequency, 1e6},{"ghz", Dim::frequency, 1e9},
    {"thz", Dim::frequency, 1e12},
    {"per_s", Dim::rate, 1.0},   {"per_ns", Dim::rate, 1e9},
    {"ppm", Dim::dimensionless, 1e-6}, {"percent", Dim::dimensionless, 1e-2},
    {"frac", Dim::dimensionless, 1.0},
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

const char* dim_name(Dim d) {
    switch (d) {
        case Dim::length: return "length";
        case Dim::time: return "time";
        case Dim::frequency: return "frequency";
        case Dim::rate: return "rate";
        case Dim::dimensionless: return "dimensionless";
    }
    return "?";
}

double parse_number(const std::string& value, const std::string& key,
                    const std::string& origin, int line) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw std::invalid_argument(origin + ":" + std::to_string(line) + ": value of '" + key +
                                    "' is not a number: " + value);
    return v;
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": empty key or value");
        if (cfg.entries_.count(key))
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": duplicate key '" + key + "'");
        cfg.entries_[key] = Entry{value, lineno, false};
    }
    return cfg;
}

const Config::Entry* Config::find(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
}

void Config::missing(const std::string& key) const {
    throw std::invalid_argument(origin_ + ": missing required key '" + key + "'");
}

bool Config::has(const std::string& key) const {
    return entries_.count(key) != 0;
}

double Config::number(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) missing(key);
    return parse_number(e->value, key, origin_, e->line);
}

std::optional<double> Config::number_opt(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return parse_number(e->value, key, origin_, e->line);
}

std::optional<double> Config::quantity_opt(const std::string& base, Dim dim) const {
    for (const auto& u : kUnits) {
        if (u.dim != dim) continue;
        const Entry* e = find(base + "_" + u.suffix);
        if (e) return parse_number(e->value, base, origin_, e->line) * u.scale;
    }
    // a key with the right base but a wrong-dimension unit is a unit error,
    // not a missing key
    for (const auto& u : kUnits) {
        if (u.dim == dim) continue;
        const std::string key = base + "_" + u.suffix;
        if (entries_.count(key))
            throw std::invalid_argument(origin_ + ": key '" + key + "' has unit '" + u.suffix +
                                        "' (" + dim_name(u.dim) + ") where a " + dim_name(dim) +
                                        " unit is required");
    }
    return std::nullopt;
}

double Config::quantity(const std::string& base, Dim dim) const {
    const auto v = quantity_opt(base, dim);
    if (!v) missing(base + "_<" + dim_name(dim) + " unit>");
    return *v;
}

std::string Config::text(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) missing(key);
    return e->value;
}

std::optional<std::string> Config::text_opt(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [key, e] : entries_)
        if (key.rfind(prefix, 0) == 0) out.push_back(key);
    return out;
}

void Config::finish() const {
    std::string bad;
    for (const auto& [key, e] : entries_) {
        if (e.used) continue;
        if (!bad.empty()) bad += ", ";
        bad += "'" + key + "' (line " + std::to_string(e.line) + ")";
    }
    if (!bad.empty())
        throw std::invalid_argument(origin_ + ": unknown keys: " + bad);
}

}  // namespace cavitykit::config
