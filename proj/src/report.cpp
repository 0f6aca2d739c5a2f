#include "cavitykit/report.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cavitykit::report {

nlohmann::json make_report(const std::string& command) {
    nlohmann::json rep;
    rep["tool"] = kToolName;
    rep["version"] = kVersion;
    rep["command"] = command;
    rep["inputs"] = nlohmann::json::array();
    rep["results"] = nlohmann::json::object();
    return rep;
}

std::string fnv1a_bytes(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot hash missing file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return fnv1a_bytes(ss.str());
}

void add_input(nlohmann::json& rep, const std::string& path) {
    rep["inputs"].push_back({{"path", path}, {"fnv1a", fnv1a_file(path)}});
}

void add_result(nlohmann::json& rep, const std::string& name, double value,
                const std::string& unit, const std::string& formula) {
    rep["results"][name] = {{"value", value}, {"unit", unit}, {"formula", formula}};
}

void write(const nlohmann::json& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write report: " + path);
    out << rep.dump(2) << "\n";
}

}  // namespace cavitykit::report
