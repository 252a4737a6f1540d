#include "tracegrowth/report.hpp"

#include "tracegrowth/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace tracegrowth::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

Json json_number(double v) {
    if (std::isfinite(v)) return v;
    // JSON has no inf/nan
    return number(v);
}

double from_json_number(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

} // namespace

double CheckResult::metric(const std::string& key) const {
    for (const auto& m : metrics) {
        if (m.name == key) return m.value;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool Report::all_passed() const {
    for (const auto& c : checks) {
        if (!c.verdict) return false;
    }
    return true;
}

const CheckResult* Report::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string to_json_text(const Report& report) {
    Json j;
    j["kind"] = report.kind;
    j["scenario"] = report.scenario;
    j["provenance"] = {{"config_hash", report.config_hash},
                       {"resolution", report.resolution},
                       {"mu_max", json_number(report.mu_max)},
                       {"seed", report.seed}};
    j["all_passed"] = report.all_passed();
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        Json metrics = Json::object();
        for (const auto& m : c.metrics) metrics[m.name] = json_number(m.value);
        checks.push_back({{"name", c.name}, {"verdict", c.verdict}, {"metrics", metrics}, {"detail", c.detail}});
    }
    j["checks"] = checks;
    j["curve_files"] = report.curve_files;
    return j.dump(2) + "\n";
}

Report report_from_json_text(const std::string& text) {
    Report r;
    try {
        const Json j = Json::parse(text);
        r.kind = j.at("kind").get<std::string>();
        r.scenario = j.at("scenario").get<std::string>();
        const auto& p = j.at("provenance");
        r.config_hash = p.at("config_hash").get<std::string>();
        r.resolution = p.at("resolution").get<int>();
        r.mu_max = from_json_number(p.at("mu_max"));
        r.seed = p.at("seed").get<std::uint64_t>();
        for (const auto& c : j.at("checks")) {
            CheckResult out;
            out.name = c.at("name").get<std::string>();
            out.verdict = c.at("verdict").get<bool>();
            out.detail = c.at("detail").get<std::string>();
            for (const auto& [k, v] : c.at("metrics").items()) out.metrics.push_back({k, from_json_number(v)});
            r.checks.push_back(std::move(out));
        }
        r.curve_files = j.at("curve_files").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string render_text(const Report& report, bool with_runtimes) {
    std::ostringstream os;
    os << report.kind << " " << (report.scenario.empty() ? "-" : report.scenario) << "\n";
    os << "config " << report.config_hash << "  resolution " << report.resolution << "  mu_max "
       << number(report.mu_max) << "  seed " << report.seed << "\n\n";
    std::size_t passed = 0;
    for (const auto& c : report.checks) {
        if (c.verdict) ++passed;
        os << (c.verdict ? "PASS " : "FAIL ") << c.name;
        if (with_runtimes) os << "  (" << number(c.runtime_s) << " s)";
        os << "\n";
        for (const auto& m : c.metrics) os << "    " << m.name << " = " << number(m.value) << "\n";
        if (!c.detail.empty()) os << "    " << c.detail << "\n";
    }
    os << "\n" << passed << "/" << report.checks.size() << " checks passed\n";
    for (const auto& f : report.curve_files) os << "curve " << f << "\n";
    return os.str();
}

std::string curve_csv(const CurveTable& table) {
    std::ostringstream os;
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << number(row[i]);
        os << "\n";
    }
    return os.str();
}

void write_outputs(Report& report, const std::string& out_dir, const std::string& stem) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());
    if (!report.curves.empty()) report.curve_files.clear();
    for (const auto& c : report.curves) {
        const std::string name = stem + "_" + c.name + ".csv";
        write_file(fs::path(out_dir) / name, curve_csv(c));
        report.curve_files.push_back(name);
    }
    write_file(fs::path(out_dir) / (stem + ".json"), to_json_text(report));
    write_file(fs::path(out_dir) / (stem + ".txt"), render_text(report, true));
}

} // namespace tracegrowth::cli
