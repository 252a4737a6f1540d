#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tracegrowth::cli {

/// Flat dotted-key configuration. Files are INI: `[chart]` followed by
/// `name = catenoid` yields the key `chart.name`. Comments start with ; or #.
class Config {
public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    /// Reading a key marks it as consumed; missing required keys and bad
    /// numbers throw InvalidConfig naming the key.
    std::string get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
    std::vector<double> numbers(const std::string& key) const;
    /// Comma-separated list with surrounding blanks removed; empty value gives an empty list.
    std::vector<std::string> list(const std::string& key) const;

    /// Keys never read, for unknown-key diagnostics.
    std::vector<std::string> unused() const;

    const std::map<std::string, std::string>& values() const { return values_; }

    /// FNV-1a 64 of the sorted key=value lines, as 16 hex digits.
    std::string hash() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> read_;
};

} // namespace tracegrowth::cli
