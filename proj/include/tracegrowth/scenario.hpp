#pragma once

#include "tracegrowth/config.hpp"
#include "tracegrowth/fields.hpp"
#include "tracegrowth/profile.hpp"
#include "tracegrowth/report.hpp"
#include "tracegrowth/symop.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tracegrowth::cli {

std::vector<std::string> builtin_scenarios();

/// Preset keys of a built-in scenario. InvalidConfig for unknown names.
Config builtin_scenario(const std::string& name);

/// When `scenario` is set, the preset keys are laid under the user's keys.
Config resolve(const Config& user);

geometry::ImmersionChart build_chart(const Config& config);
fields::OperatorField build_field(const Config& config, const geometry::ImmersionChart& chart);
/// t_max defaults to max(10, 2 mu_max + 1).
comparison::ComparisonProfile build_profile(const Config& config);

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> resolution;
    std::optional<double> mu_max;
};

/// Identity suites, hypothesis checks, growth curve, theorem bounds and F/G
/// checks as requested by the config. Deterministic given the config.
Report run_scenario(const Config& config, const RunOverrides& overrides = {});

/// Solve the configured profile; one curve with columns t, h, dh, gap.
Report run_profile(const Config& config);

struct VerifyOptions {
    std::uint64_t seed = 1;
    int count = 1000;
    std::vector<int> dims{2, 3, 4, 5, 6};
    int semidefinite_count = 200;
    int field_points = 50;
};

/// Randomized symop and fields invariant suites.
Report verify_identities(const VerifyOptions& options);

/// Newton-operator identity checks over the given operators: trace
/// identities, spectral identity, commutator and rank witness.
std::vector<CheckResult> symop_suite(std::span<const symop::SymOp> ops);

} // namespace tracegrowth::cli
