#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cavitykit::config {

// key = value files with explicit units encoded in key names, for example
// wavelength_nm = 1310. Lines starting with # are comments. Lookups convert
// to SI; unused keys are rejected by finish().

enum class Dim { length, time, frequency, rate, dimensionless };

class Config {
public:
    static Config load(const std::string& path);
    static Config parse(const std::string& text, const std::string& origin = "<string>");

    // plain numeric value under an exact key
    double number(const std::string& key) const;
    std::optional<double> number_opt(const std::string& key) const;

    // value of key base_<unit> for any unit of the dimension, converted to SI
    double quantity(const std::string& base, Dim dim) const;
    std::optional<double> quantity_opt(const std::string& base, Dim dim) const;

    std::string text(const std::string& key) const;
    std::optional<std::string> text_opt(const std::string& key) const;

    bool has(const std::string& key) const;
    const std::string& origin() const { return origin_; }

    // all keys starting with the prefix, in file-sorted order; does not mark
    // them used
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    // throws naming every key that was never consumed, with its line number
    void finish() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };
    std::map<std::string, Entry> entries_;
    std::string origin_;

    const Entry* find(const std::string& key) const;
    [[noreturn]] void missing(const std::string& key) const;
};

}  // namespace cavitykit::config
