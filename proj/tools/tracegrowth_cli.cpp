#include "tracegrowth/error.hpp"
#include "tracegrowth/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace tc = tracegrowth::cli;

namespace {

tc::Config load(const std::string& path, const std::string& scenario) {
    if (path.empty() && scenario.empty()) {
        throw tracegrowth::Error(tracegrowth::ErrorCode::InvalidConfig, "one of --config or --scenario is required");
    }
    tc::Config cfg = path.empty() ? tc::Config() : tc::Config::from_file(path);
    if (!scenario.empty()) cfg.set("scenario", scenario);
    return cfg;
}

int finish(tc::Report& report, const std::string& out_dir, const std::string& stem) {
    if (!out_dir.empty()) tc::write_outputs(report, out_dir, stem);
    std::cout << tc::render_text(report, true);
    return report.all_passed() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace growth checks"};
    app.require_subcommand(1);

    std::string config_path, scenario, out_dir, input;
    std::uint64_t seed = 1;
    int count = 1000;
    std::vector<int> dims{2, 3, 4, 5, 6};
    int resolution = 0;
    double mu_max = 0.0;

    auto* verify = app.add_subcommand("verify", "randomized identity suites");
    verify->add_option("--seed", seed);
    verify->add_option("--count", count, "random operators")->check(CLI::PositiveNumber);
    verify->add_option("--dims", dims, "operator dimensions")->delimiter(',');
    verify->add_option("--out-dir", out_dir);

    auto* profile = app.add_subcommand("profile", "solve a comparison profile");
    profile->add_option("--config", config_path)->check(CLI::ExistingFile);
    profile->add_option("--scenario", scenario);
    profile->add_option("--mu-max", mu_max);
    profile->add_option("--out-dir", out_dir);

    auto* growth = app.add_subcommand("growth", "mesh a ball, integrate the trace and test the bounds");
    growth->add_option("--config", config_path)->check(CLI::ExistingFile);
    growth->add_option("--scenario", scenario);
    growth->add_option("--out-dir", out_dir);
    auto* seed_opt = growth->add_option("--seed", seed);
    auto* res_opt = growth->add_option("--resolution", resolution)->check(CLI::PositiveNumber);
    auto* mu_opt = growth->add_option("--mu-max", mu_max)->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "re-render a JSON report");
    report->add_option("--input", input)->required()->check(CLI::ExistingFile);
    report->add_option("--out-dir", out_dir);

    auto* list = app.add_subcommand("scenarios", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) {
            tc::VerifyOptions o;
            o.seed = seed;
            o.count = count;
            o.dims = dims;
            tc::Report r = tc::verify_identities(o);
            return finish(r, out_dir, "verify");
        }
        if (profile->parsed()) {
            tc::Config cfg = load(config_path, scenario);
            if (mu_max > 0.0) {
                std::ostringstream os;
                os.precision(17);
                os << mu_max;
                cfg.set("run.mu_max", os.str());
            }
            tc::Report r = tc::run_profile(cfg);
            return finish(r, out_dir, "profile");
        }
        if (growth->parsed()) {
            tc::RunOverrides o;
            if (*seed_opt) o.seed = seed;
            if (*res_opt) o.resolution = resolution;
            if (*mu_opt) o.mu_max = mu_max;
            tc::Report r = tc::run_scenario(load(config_path, scenario), o);
            return finish(r, out_dir, r.scenario.empty() ? "growth" : r.scenario);
        }
        if (report->parsed()) {
            std::ifstream in(input);
            std::stringstream ss;
            ss << in.rdbuf();
            tc::Report r = tc::report_from_json_text(ss.str());
            if (!out_dir.empty()) {
                tc::write_outputs(r, out_dir, r.scenario.empty() ? r.kind : r.scenario);
            }
            std::cout << tc::render_text(r, false);
            return r.all_passed() ? 0 : 2;
        }
        if (list->parsed()) {
            for (const auto& s : tc::builtin_scenarios()) std::cout << s << "\n";
            return 0;
        }
    } catch (const tracegrowth::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
