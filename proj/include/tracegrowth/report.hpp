#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tracegrowth::cli {

struct Metric {
    std::string name;
    double value = 0.0;
};

struct CheckResult {
    std::string name;
    bool verdict = false;
    std::vector<Metric> metrics;
    std::string detail;
    double runtime_s = 0.0; // summary only; kept out of the JSON so reruns compare equal

    double metric(const std::string& key) const;
};

struct CurveTable {
    std::string name;
    std::vector<std::string> columns{"mu", "f", "F", "G", "bound", "margin"};
    std::vector<std::vector<double>> rows;
};

struct Report {
    std::string kind; // "scenario", "verify" or "profile"
    std::string scenario;
    std::string config_hash;
    int resolution = 0;
    double mu_max = 0.0;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    std::vector<CurveTable> curves;
    std::vector<std::string> curve_files;

    bool all_passed() const;
    /// nullptr when absent.
    const CheckResult* find(const std::string& name) const;
};

std::string to_json_text(const Report& report);
/// Inverse of to_json_text (curves are not stored in the JSON). Throws InvalidConfig on malformed input.
Report report_from_json_text(const std::string& text);

std::string render_text(const Report& report, bool with_runtimes);
std::string curve_csv(const CurveTable& table);

/// Writes <stem>.json, <stem>.txt and one CSV per curve into out_dir and
/// records the CSV names in report.curve_files. Throws Io on failure.
void write_outputs(Report& report, const std::string& out_dir, const std::string& stem);

} // namespace tracegrowth::cli
