#pragma once

#include <string>

#include <json.hpp>

namespace cavitykit::report {

inline constexpr const char* kToolName = "cavitykit";
inline constexpr const char* kVersion = "0.1.0";

// Skeleton every JSON report shares: tool, version, command, inputs, results.
nlohmann::json make_report(const std::string& command);

// FNV-1a 64-bit hash of a file's bytes, hex encoded; used to pin report inputs.
std::string fnv1a_file(const std::string& path);
std::string fnv1a_bytes(const std::string& bytes);

// Registers an input file with its hash.
void add_input(nlohmann::json& rep, const std::string& path);

// One derived quantity: value, unit, and the formula or provenance string it
// came from.
void add_result(nlohmann::json& rep, const std::string& name, double value,
                const std::string& unit, const std::string& formula);

// Serializes with a stable key order and a trailing newline.
void write(const nlohmann::json& rep, const std::string& path);

}  // namespace cavitykit::report
