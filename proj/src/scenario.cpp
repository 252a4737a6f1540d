#include "tracegrowth/scenario.hpp"

#include "tracegrowth/charts.hpp"
#include "tracegrowth/comparison.hpp"
#include "tracegrowth/error.hpp"
#include "tracegrowth/expr.hpp"
#include "tracegrowth/growth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace tracegrowth::cli {

namespace {

using Eigen::VectorXd;
using fields::OperatorField;
using fields::ScalarField;
using geometry::ImmersionChart;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> table{
        {"plane", R"(
[chart]
name = plane
half_width = 12
[field]
preset = identity
[profile]
curvature = flat
alpha = inverse_shifted
eps = 1
[run]
resolution = 128
mu_max = 10
[checks]
theorems = lambda_bound, log_growth, trace_bound
hypotheses = psd, alpha_bound, radial_bound
identities = flat_radial, comparison_equality, divergence_expansion
domain_mu = 2, 5
)"},
        {"cylinder_newton", R"(
[chart]
name = cylinder
radius = 1
half_height = 16
orientation = -1
[field]
preset = newton
j = 1
[profile]
curvature = flat
alpha = zero
[run]
resolution = 256
mu_max = 15
[checks]
theorems = linear_growth, lambda_bound
hypotheses = psd, alpha_bound
identities = newton_divergence, flat_radial, comparison_equality
)"},
        {"catenoid", R"(
[chart]
name = catenoid
v_max = 3
[field]
preset = identity
[profile]
curvature = flat
alpha = zero
[run]
resolution = 256
mu_max = 8
theorem_tol = 0.07
[checks]
theorems = linear_growth, lambda_bound
hypotheses = psd, alpha_bound
identities = newton_divergence, flat_radial, comparison_equality, divergence_expansion
domain_mu = 2, 4
)"},
        {"helicoid", R"(
[chart]
name = helicoid
v_max = 3
t_max = 10
[field]
preset = identity
[profile]
curvature = flat
alpha = zero
[run]
resolution = 256
mu_max = 7
theorem_tol = 0.07
[checks]
theorems = linear_growth
hypotheses = psd, alpha_bound
identities = newton_divergence, flat_radial
)"},
        {"h2_totally_geodesic", R"(
[chart]
name = hyperbolic_plane
c = 1
half_width = 5
[field]
preset = identity
[profile]
curvature = hyperbolic
c = 1
alpha = scaled
alpha_c = 1
[run]
resolution = 192
mu_max = 4.5
[checks]
theorems = lambda_bound, trace_bound, rate_closed_form
hypotheses = psd, alpha_bound, radial_bound
identities = comparison_equality, divergence_expansion
)"},
        {"h2_lambda_exp", R"(
[chart]
name = hyperbolic_plane
c = 1
half_width = 5
[field]
preset = lambda_identity
lambda = exp(-r)
s = 1
[profile]
curvature = hyperbolic
c = 1
alpha = scaled
alpha_c = 1
[run]
resolution = 192
mu_max = 4.5
[checks]
theorems = lambda_bound, trace_bound, rate_closed_form
hypotheses = psd, alpha_bound, radial_bound, scalar_bound, end_bound
scalar_p = 1
scalar_coefficient = 1
end_ball_mu = 0.5
end_ball_c = 1
end_ball_kappa = 1
end_ball_p = 1
identities = comparison_equality
)"},
        {"plane_foliation", R"(
[chart]
name = plane
half_width = 8
[field]
preset = distribution
span1 = cos(0.4), sin(0.4)
[profile]
curvature = flat
alpha = zero
[run]
resolution = 128
mu_max = 6
[checks]
theorems = linear_growth
hypotheses = psd, alpha_bound
identities = foliation
)"},
        {"graph_foliation", R"(
[chart]
name = graph
height = u1^2
half_width = 3
[field]
preset = distribution
span1 = 1, 0
[profile]
curvature = flat
alpha = zero
[run]
resolution = 128
mu_max = 2
[checks]
growth = 1
identities = foliation
)"},
    };
    return table;
}

std::vector<std::string> param_names(int m) {
    std::vector<std::string> out;
    for (int a = 1; a <= m; ++a) out.push_back("u" + std::to_string(a));
    return out;
}

VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ImmersionChart custom_chart(const Config& cfg, geometry::ChartOptions options) {
    const std::string kind = cfg.get("chart.ambient", "euclidean");
    const int n = static_cast<int>(cfg.integer("chart.ambient_dim", 3));
    geometry::AmbientSpace amb = kind == "hyperbolic" ? geometry::AmbientSpace::hyperbolic(n, cfg.number("chart.c", 1.0))
                                 : kind == "euclidean"
                                     ? geometry::AmbientSpace::euclidean(n)
                                     : throw Error(ErrorCode::InvalidConfig, "chart.ambient: expected euclidean or hyperbolic");
    geometry::ParamDomain dom;
    dom.lower = to_vector(cfg.numbers("chart.lower"));
    dom.upper = to_vector(cfg.numbers("chart.upper"));
    const int m = dom.dim();
    std::vector<double> periodic = cfg.has("chart.periodic") ? cfg.numbers("chart.periodic") : std::vector<double>(m, 0.0);
    if (static_cast<int>(periodic.size()) != m) throw Error(ErrorCode::InvalidConfig, "chart.periodic: one flag per axis");
    for (double p : periodic) dom.periodic.push_back(p != 0.0);
    VectorXd base = to_vector(cfg.numbers("chart.base"));
    std::vector<expr::Expression> coords;
    for (int i = 1; i <= amb.coord_dim(); ++i) {
        coords.push_back(expr::Expression::parse(cfg.get("chart.x" + std::to_string(i)), param_names(m)));
    }
    auto map = [coords](const VectorXd& u) {
        VectorXd x(static_cast<Eigen::Index>(coords.size()));
        for (std::size_t i = 0; i < coords.size(); ++i) {
            x(static_cast<Eigen::Index>(i)) = coords[i](std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
        }
        return x;
    };
    return ImmersionChart(cfg.get("chart.label", "custom"), amb, dom, map, base, options);
}

ScalarField lambda_field(const Config& cfg, const ImmersionChart& chart) {
    std::vector<std::string> vars{"r"};
    for (const auto& s : param_names(chart.dim())) vars.push_back(s);
    const expr::Expression e = expr::Expression::parse(cfg.get("field.lambda"), vars);
    bool uses_params = false;
    for (int a = 1; a <= chart.dim(); ++a) uses_params = uses_params || e.uses("u" + std::to_string(a));
    const int m = chart.dim();
    if (!uses_params) {
        auto fn = [e, m](double r) {
            std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
            v[0] = r;
            return e(v);
        };
        auto dfn = [fn](double r) {
            const double h = 1e-5 * (1.0 + std::abs(r));
            return (fn(r + h) - fn(r - h)) / (2.0 * h);
        };
        return ScalarField::radial(chart, fn, dfn);
    }
    return ScalarField([e, chart, m](const VectorXd& u) {
        std::vector<double> v(static_cast<std::size_t>(m) + 1);
        v[0] = geometry::ambient_distance(chart, u);
        for (int a = 0; a < m; ++a) v[static_cast<std::size_t>(a) + 1] = u(a);
        return e(v);
    });
}

// ---- identity suites ----

std::vector<VectorXd> sample_points(const ImmersionChart& chart, std::mt19937_64& rng, int count) {
    const auto& d = chart.domain();
    std::vector<VectorXd> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < count && attempts < 100 * count) {
        ++attempts;
        VectorXd u(d.dim());
        for (int a = 0; a < d.dim(); ++a) {
            const double shrink = d.periodic[static_cast<std::size_t>(a)] ? 1.0 : 0.8;
            const double mid = 0.5 * (d.lower(a) + d.upper(a));
            std::uniform_real_distribution<double> dist(mid - 0.5 * shrink * d.period(a), mid + 0.5 * shrink * d.period(a));
            u(a) = dist(rng);
        }
        if (geometry::ambient_distance(chart, u) < 1e-2) continue;
        out.push_back(u);
    }
    return out;
}

template <class F>
CheckResult timed(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r = f();
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

CheckResult flat_radial_suite(const std::string& name, const std::vector<OperatorField>& presets,
                              const std::vector<VectorXd>& points) {
    CheckResult c;
    c.name = name;
    double worst = 0.0;
    int evaluated = 0;
    for (const auto& phi : presets) {
        if (phi.chart().ambient().is_hyperbolic()) {
            throw Error(ErrorCode::Unsupported, "flat_radial needs a Euclidean ambient");
        }
        const auto y = geometry::position_field(phi.chart());
        for (const auto& u : points) {
            const double tr = phi.mixed(u).trace();
            worst = std::max(worst, std::abs(fields::phi_divergence(phi, y, u) - tr) / (1.0 + std::abs(tr)));
            ++evaluated;
        }
    }
    c.metrics = {{"max_relative_residual", worst}, {"evaluations", static_cast<double>(evaluated)}};
    c.verdict = worst <= 1e-4;
    return c;
}

CheckResult comparison_equality_suite(const std::string& name, const std::vector<OperatorField>& presets,
                                      const std::vector<VectorXd>& points) {
    CheckResult c;
    c.name = name;
    double worst = 0.0;
    int evaluated = 0;
    for (const auto& phi : presets) {
        const auto& chart = phi.chart();
        double rmax = 1.0;
        for (const auto& u : points) rmax = std::max(rmax, geometry::ambient_distance(chart, u));
        const auto profile = comparison::solve_profile(
            comparison::CurvatureFunction::constant(chart.ambient().curvature()), comparison::AlphaFunction::zero(),
            rmax + 1.0, 0.005);
        for (const auto& u : points) {
            const double r = geometry::ambient_distance(chart, u);
            const double res = comparison::pointwise_comparison_residual(phi, profile, u);
            const double scale = 1.0 + std::abs(profile.dh(r) * phi.mixed(u).trace());
            worst = std::max(worst, std::abs(res) / scale);
            ++evaluated;
        }
    }
    c.metrics = {{"max_scaled_residual", worst}, {"evaluations", static_cast<double>(evaluated)}};
    c.verdict = worst <= 1e-3;
    return c;
}

CheckResult newton_divergence_suite(const std::string& name, const std::vector<ImmersionChart>& list,
                                    const std::vector<std::vector<VectorXd>>& points) {
    CheckResult c;
    c.name = name;
    double worst = 0.0, worst_abs = 0.0;
    int evaluated = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& chart = list[i];
        const auto shape = OperatorField::shape_operator(chart);
        for (const auto& u : points[i]) {
            const fields::FieldSample s = fields::sample(shape, u);
            double grad = 0.0;
            for (const auto& cov : s.covariant) grad += cov.squaredNorm();
            const double scale = 1.0 + s.phi.frobenius_norm() * std::sqrt(grad);
            for (int j = 1; j <= chart.dim() - 1; ++j) {
                const double d = fields::newton_divergence_check(chart, j, u);
                worst = std::max(worst, d / scale);
                worst_abs = std::max(worst_abs, d);
                ++evaluated;
            }
        }
    }
    c.metrics = {{"max_scaled_divergence", worst},
                 {"max_divergence", worst_abs},
                 {"evaluations", static_cast<double>(evaluated)}};
    c.verdict = worst <= 1e-3;
    return c;
}

CheckResult expansion_suite(const std::string& name, const std::vector<OperatorField>& presets,
                              const std::vector<VectorXd>& points, std::mt19937_64& rng) {
    CheckResult c;
    c.name = name;
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double wa = 0.0, wb = 0.0, wc = 0.0;
    int evaluated = 0;
    const ScalarField f([](const VectorXd& u) { return 0.5 + std::sin(u(0)) + 0.3 * u(u.size() - 1) * u(u.size() - 1); });
    for (const auto& phi : presets) {
        const auto& chart = phi.chart();
        const int dim = chart.ambient().coord_dim();
        for (const auto& u : points) {
            VectorXd c0(dim), c1(dim), c2(dim);
            for (int i = 0; i < dim; ++i) {
                c0(i) = coef(rng);
                c1(i) = coef(rng);
                c2(i) = coef(rng);
            }
            geometry::ChartVectorField x = [chart, c0, c1, c2](const VectorXd& v) -> VectorXd {
                const VectorXd p = chart(v);
                return chart.ambient().project_to_tangent(p, c0 + p(0) * c1 + p(1) * p(1) * c2);
            };
            const auto r = fields::divergence_expansion_residuals(phi, x, f, u);
            wa = std::max(wa, r.r_a / r.scale);
            wb = std::max(wb, r.r_b / r.scale);
            wc = std::max(wc, r.r_c / r.scale);
            ++evaluated;
        }
    }
    c.metrics = {{"max_r_a", wa}, {"max_r_b", wb}, {"max_r_c", wc}, {"evaluations", static_cast<double>(evaluated)}};
    c.verdict = std::max({wa, wb, wc}) <= 1e-3;
    return c;
}

CheckResult foliation_suite(const std::string& name, const OperatorField& field, const std::vector<VectorXd>& points,
                            double threshold) {
    CheckResult c;
    c.name = name;
    double worst = 0.0, leaf = 0.0;
    for (const auto& u : points) {
        const auto r = fields::foliation_identity_residual(field, u);
        worst = std::max(worst, r.residual);
        leaf = std::max(leaf, field.chart().ambient().norm(r.leaf_mean_curvature));
    }
    c.metrics = {{"max_residual", worst}, {"max_leaf_mean_curvature", leaf}, {"evaluations", static_cast<double>(points.size())}};
    c.verdict = worst <= threshold;
    return c;
}

symop::SymOp random_symmetric(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd a(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) a(i, j) = u(rng);
    }
    return symop::SymOp(a);
}

CheckResult semidefinite_suite(std::mt19937_64& rng, const std::vector<int>& dims, int count) {
    // S_{j+1} = 0 enforced by solving for the last eigenvalue, then rotated by a random orthogonal matrix
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int built = 0, indefinite = 0, resampled = 0;
    while (built < count) {
        const int m = dims[static_cast<std::size_t>(built) % dims.size()];
        if (m < 2) throw Error(ErrorCode::InvalidConfig, "dims must be at least 2");
        const int j = built % (m - 1) + 1;
        std::vector<double> free(static_cast<std::size_t>(m - 1));
        for (auto& x : free) x = u(rng);
        const double cof = symop::elementary_symmetric(free, j);
        if (std::abs(cof) < 1e-3) {
            ++resampled;
            continue;
        }
        std::vector<double> ev = free;
        ev.push_back(-symop::elementary_symmetric_extended(free, j + 1) / cof);
        Eigen::MatrixXd a(m, m);
        for (int r = 0; r < m; ++r) {
            for (int k = 0; k < m; ++k) a(r, k) = u(rng);
        }
        const Eigen::MatrixXd q = a.householderQr().householderQ();
        const symop::SymOp t(q * to_vector(ev).asDiagonal() * q.transpose());
        if (symop::semidefinite_class(symop::newton_operator(t, j), 1e-9) == symop::Definiteness::Indefinite) {
            ++indefinite;
        }
        ++built;
    }
    CheckResult c;
    c.name = "symop.semidefinite";
    c.metrics = {{"operators", static_cast<double>(built)},
                 {"indefinite", static_cast<double>(indefinite)},
                 {"resampled", static_cast<double>(resampled)}};
    c.verdict = indefinite == 0;
    return c;
}

std::optional<ballgrowth::HypothesisKind> hypothesis_from_string(const std::string& s) {
    using ballgrowth::HypothesisKind;
    for (auto k : {HypothesisKind::Psd, HypothesisKind::AlphaBound, HypothesisKind::RadialBound,
                   HypothesisKind::ScalarBound, HypothesisKind::EndBound}) {
        if (ballgrowth::to_string(k) == s) return k;
    }
    return std::nullopt;
}

// Everything the run needs, read up front so unknown keys are reported before any work.
struct Plan {
    std::string scenario;
    int resolution = 128;
    bool relax = true;
    double mu_max = 0.0;
    std::optional<double> mu0;
    std::uint64_t seed = 1;
    int samples = 50;
    double theorem_tol = 0.0;
    double fg_slack = 0.07;
    double hypothesis_tol = 1e-3;
    double domain_slack = 0.05;
    std::vector<std::string> theorems;
    std::vector<std::string> hypotheses;
    std::vector<std::string> identities;
    std::vector<double> domain_mu;
    bool growth = false;
    double scalar_p = 1.0, scalar_coefficient = kNaN;
    std::optional<double> end_ball_mu;
    double end_ball_c = 1.0, end_ball_kappa = 0.0, end_ball_p = 1.0;
};

std::vector<std::string> optional_list(const Config& cfg, const std::string& key) {
    return cfg.has(key) ? cfg.list(key) : std::vector<std::string>{};
}

Plan read_plan(const Config& cfg) {
    Plan p;
    p.scenario = cfg.get("scenario", "custom");
    p.resolution = static_cast<int>(cfg.integer("run.resolution", 128));
    p.relax = cfg.integer("run.relax", 1) != 0;
    p.seed = static_cast<std::uint64_t>(cfg.integer("run.seed", 1));
    p.samples = static_cast<int>(cfg.integer("run.samples", 50));
    p.theorem_tol = cfg.number("run.theorem_tol", 0.0);
    p.fg_slack = cfg.number("run.fg_slack", 0.07);
    p.hypothesis_tol = cfg.number("run.hypothesis_tol", 1e-3);
    p.domain_slack = cfg.number("run.domain_slack", 0.05);
    p.theorems = optional_list(cfg, "checks.theorems");
    p.hypotheses = optional_list(cfg, "checks.hypotheses");
    p.identities = optional_list(cfg, "checks.identities");
    if (cfg.has("checks.domain_mu")) p.domain_mu = cfg.numbers("checks.domain_mu");
    p.scalar_p = cfg.number("checks.scalar_p", 1.0);
    p.scalar_coefficient = cfg.number("checks.scalar_coefficient", kNaN);
    if (cfg.has("checks.end_ball_mu")) p.end_ball_mu = cfg.number("checks.end_ball_mu");
    p.end_ball_c = cfg.number("checks.end_ball_c", 1.0);
    p.end_ball_kappa = cfg.number("checks.end_ball_kappa", 0.0);
    p.end_ball_p = cfg.number("checks.end_ball_p", 1.0);
    p.growth = cfg.integer("checks.growth", 0) != 0 || !p.theorems.empty() || !p.hypotheses.empty() ||
               !p.domain_mu.empty() || p.end_ball_mu.has_value();
    if (p.growth || cfg.has("run.mu_max")) p.mu_max = cfg.number("run.mu_max");
    if (cfg.has("run.mu0")) p.mu0 = cfg.number("run.mu0");

    if (p.resolution < 32) throw Error(ErrorCode::InvalidConfig, "run.resolution: must be at least 32");
    if (p.samples < 1) throw Error(ErrorCode::InvalidConfig, "run.samples: must be positive");
    if (p.growth && !(p.mu_max > 0.0)) throw Error(ErrorCode::InvalidConfig, "run.mu_max: must be positive");
    for (const auto& t : p.theorems) {
        if (!ballgrowth::theorem_from_string(t)) throw Error(ErrorCode::InvalidConfig, "checks.theorems: unknown '" + t + "'");
    }
    for (const auto& h : p.hypotheses) {
        if (!hypothesis_from_string(h)) throw Error(ErrorCode::InvalidConfig, "checks.hypotheses: unknown '" + h + "'");
    }
    static const std::vector<std::string> known{"flat_radial", "comparison_equality", "newton_divergence", "divergence_expansion",
                                                "foliation"};
    for (const auto& i : p.identities) {
        if (std::find(known.begin(), known.end(), i) == known.end()) {
            throw Error(ErrorCode::InvalidConfig, "checks.identities: unknown '" + i + "'");
        }
    }
    return p;
}

void append_growth(Report& report, const Plan& plan, const OperatorField& phi,
                   const comparison::ComparisonProfile& profile) {
    using namespace ballgrowth;
    const auto& chart = phi.chart();
    const int m = chart.dim();

    const auto mesh_start = std::chrono::steady_clock::now();
    const MeshedBall ball = mesh_and_distance(chart, {plan.resolution, plan.relax});
    GrowthOptions options;
    options.mu_max = plan.mu_max;
    options.mu0 = plan.mu0;
    const GrowthCurve curve = growth_curve(ball, phi, profile, options);
    const double mesh_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - mesh_start).count();

    CheckResult g;
    g.name = "growth";
    bool monotone = curve.f.front() == 0.0;
    const double fmax = *std::max_element(curve.f.begin(), curve.f.end());
    for (std::size_t i = 1; i < curve.f.size(); ++i) monotone = monotone && curve.f[i] >= curve.f[i - 1] - 1e-12 * fmax;
    g.verdict = monotone;
    g.metrics = {{"lambda", curve.lambda},
                 {"trace_at_base", curve.trace_at_base},
                 {"mu0", curve.mu0},
                 {"f_at_mu_max", curve.f.back()},
                 {"tail_lo", curve.tail_lo},
                 {"tail_hi", curve.tail_hi},
                 {"tail_slope", curve.secant_slope(curve.tail_lo, curve.tail_hi)},
                 {"rate_log", curve.rate_log},
                 {"rate_linear", curve.rate_linear},
                 {"spacing", ball.spacing()},
                 {"max_radius", ball.max_radius()},
                 {"relax_sweeps", static_cast<double>(ball.sweeps())}};
    g.detail = monotone ? "" : "f is not non-decreasing";
    g.runtime_s = mesh_time;
    report.checks.push_back(g);

    CurveTable base;
    base.name = "curve";
    for (std::size_t i = 0; i < curve.mu.size(); ++i) {
        base.rows.push_back({curve.mu[i], curve.f[i], curve.F[i], curve.G[i], kNaN, kNaN});
    }
    report.curves.push_back(base);

    // hypotheses: requested ones plus whatever the theorems need
    std::vector<std::string> names = plan.hypotheses;
    auto need = [&](const std::string& n) {
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    };
    for (const auto& t : plan.theorems) {
        need("psd");
        need("alpha_bound");
        if (t == "trace_bound" || t == "rate_closed_form") need("radial_bound");
    }
    std::vector<HypothesisSpec> specs;
    for (const auto& n : names) {
        HypothesisSpec s;
        s.kind = *hypothesis_from_string(n);
        if (s.kind == HypothesisKind::ScalarBound) {
            if (std::isnan(plan.scalar_coefficient)) {
                throw Error(ErrorCode::InvalidConfig, "checks.scalar_coefficient: missing required key");
            }
            s.p = plan.scalar_p;
            s.coefficient = plan.scalar_coefficient;
        } else if (s.kind == HypothesisKind::EndBound) {
            s.p = plan.end_ball_p;
            s.coefficient = plan.end_ball_kappa;
        }
        specs.push_back(s);
    }
    const double radius = std::min(plan.mu_max, profile.mu_bound().value());
    const auto hyp_start = std::chrono::steady_clock::now();
    const auto reports = hypothesis_check(ball, phi, profile, specs, radius, plan.hypothesis_tol);
    const double hyp_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - hyp_start).count();
    auto passed = [&](HypothesisKind k) {
        for (const auto& r : reports) {
            if (r.kind == k) return r.verdict;
        }
        return false;
    };
    for (const auto& r : reports) {
        CheckResult c;
        c.name = "hypothesis." + std::string(to_string(r.kind));
        c.verdict = r.verdict;
        c.metrics = {{"min_margin", r.min_margin},
                     {"nodes_checked", static_cast<double>(r.nodes_checked)},
                     {"radius", radius},
                     {"worst_u1", r.worst_u(0)},
                     {"worst_u2", r.worst_u(1)}};
        c.runtime_s = hyp_time / static_cast<double>(reports.size());
        report.checks.push_back(c);
    }

    for (const auto& name : plan.theorems) {
        report.checks.push_back(timed([&] {
            CheckResult c;
            c.name = "theorem." + name;
            try {
                const BoundTable t = theorem_bound(curve, profile, *theorem_from_string(name), reports, plan.theorem_tol);
                c.verdict = t.satisfied;
                c.metrics = {{"lambda", curve.lambda},
                             {"window_lo", t.window_lo},
                             {"window_hi", t.window_hi},
                             {"min_relative_margin", t.min_relative_margin},
                             {"tolerance", plan.theorem_tol}};
                CurveTable table;
                table.name = name;
                for (std::size_t i = 0; i < t.mu.size(); ++i) {
                    table.rows.push_back({curve.mu[i], curve.f[i], curve.F[i], curve.G[i], t.bound[i], t.margin[i]});
                }
                report.curves.push_back(table);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::HypothesisViolated) throw;
                c.verdict = false;
                c.detail = e.what();
            }
            return c;
        }));
    }

    const bool lambda_bound_route = passed(HypothesisKind::Psd) && passed(HypothesisKind::AlphaBound);
    if (lambda_bound_route) {
        const FGReport fg = fg_checks(curve, profile, plan.fg_slack);
        report.checks.push_back({"fg.f_geq_g", fg.f_geq_g, {{"worst_relative", fg.worst_f_minus_g}, {"slack", plan.fg_slack}}, "", 0.0});
        report.checks.push_back(
            {"fg.g_geq_bound", fg.g_geq_bound, {{"worst_relative", fg.worst_g_minus_bound}, {"slack", plan.fg_slack}}, "", 0.0});
        if (passed(HypothesisKind::RadialBound)) {
            report.checks.push_back(
                {"fg.f_geq_mg", fg.f_geq_mg, {{"worst_relative", fg.worst_f_minus_mg}, {"slack", plan.fg_slack}}, "", 0.0});
        }
    }

    for (double mu : plan.domain_mu) {
        report.checks.push_back(timed([&] {
            const auto d = comparison::domain_comparison_check(phi, profile, ball, mu);
            CheckResult c;
            std::ostringstream name;
            name << "domain_comparison.mu_" << mu;
            c.name = name.str();
            c.verdict = d.slack >= -plan.domain_slack * std::abs(d.rhs);
            c.metrics = {{"lhs", d.lhs}, {"rhs", d.rhs}, {"slack", d.slack}, {"shell_nodes", static_cast<double>(d.shell_nodes)}};
            return c;
        }));
    }

    if (plan.end_ball_mu) {
        report.checks.push_back(timed([&] {
            if (!phi.lambda()) throw Error(ErrorCode::InvalidConfig, "checks.end_ball_mu: needs field.preset = lambda_identity");
            const double c = plan.end_ball_c;
            const auto sphere_profile =
                comparison::solve_profile(comparison::CurvatureFunction::spherical(c),
                                          comparison::AlphaFunction::constant(plan.end_ball_kappa), std::numbers::pi / c + 0.5, 1e-3);
            const auto e = end_ball_estimate(ball, *phi.lambda(), sphere_profile, *plan.end_ball_mu);
            CheckResult out;
            out.name = "end_ball";
            out.verdict = e.measured >= e.bound * (1.0 - plan.fg_slack);
            out.metrics = {{"mu", *plan.end_ball_mu}, {"gamma", e.gamma}, {"bound", e.bound}, {"measured", e.measured}};
            (void)m;
            return out;
        }));
    }
}

} // namespace

std::vector<std::string> builtin_scenarios() {
    std::vector<std::string> out;
    for (const auto& [k, v] : presets()) out.push_back(k);
    return out;
}

Config builtin_scenario(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw Error(ErrorCode::InvalidConfig, "scenario: unknown built-in '" + name + "'");
    Config c = Config::from_string(it->second);
    c.set("scenario", name);
    return c;
}

Config resolve(const Config& user) {
    if (!user.has("scenario")) return user;
    Config merged = builtin_scenario(user.values().at("scenario"));
    for (const auto& [k, v] : user.values()) merged.set(k, v);
    return merged;
}

ImmersionChart build_chart(const Config& cfg) {
    geometry::ChartOptions o;
    o.fd_step = cfg.number("chart.fd_step", 1e-4);
    o.richardson = cfg.integer("chart.richardson", 0) != 0;
    o.orientation = static_cast<int>(cfg.integer("chart.orientation", 1));
    const std::string name = cfg.get("chart.name");
    namespace ch = geometry::charts;
    if (name == "plane") return ch::plane(cfg.number("chart.half_width", 12.0), o);
    if (name == "cylinder") return ch::cylinder(cfg.number("chart.radius", 1.0), cfg.number("chart.half_height", 16.0), o);
    if (name == "sphere") return ch::sphere(cfg.number("chart.radius", 1.0), o);
    if (name == "catenoid") return ch::catenoid(cfg.number("chart.v_max", 3.0), o);
    if (name == "helicoid") return ch::helicoid(cfg.number("chart.v_max", 3.0), cfg.number("chart.t_max", 10.0), o);
    if (name == "hyperbolic_plane") return ch::hyperbolic_plane(cfg.number("chart.c", 1.0), cfg.number("chart.half_width", 5.0), o);
    if (name == "round_sphere") {
        return ch::round_sphere(static_cast<int>(cfg.integer("chart.dim", 2)), cfg.number("chart.radius", 1.0), o);
    }
    if (name == "graph") {
        const auto e = expr::Expression::parse(cfg.get("chart.height"), {"u1", "u2"});
        return ch::graph(cfg.get("chart.label", "graph"), [e](double x, double y) {
            const double v[2] = {x, y};
            return e(v);
        }, cfg.number("chart.half_width", 3.0), o);
    }
    if (name == "custom") return custom_chart(cfg, o);
    throw Error(ErrorCode::InvalidConfig, "chart.name: unknown chart '" + name + "'");
}

OperatorField build_field(const Config& cfg, const ImmersionChart& chart) {
    const std::string preset = cfg.get("field.preset", "identity");
    std::optional<OperatorField> out;
    if (preset == "identity") {
        out = OperatorField::identity(chart);
    } else if (preset == "lambda_identity") {
        out = OperatorField::lambda_identity(chart, lambda_field(cfg, chart), cfg.number("field.s", 1.0));
    } else if (preset == "newton") {
        out = OperatorField::newton(chart, static_cast<int>(cfg.integer("field.j", 1)));
    } else if (preset == "shape_operator") {
        out = OperatorField::shape_operator(chart);
    } else if (preset == "distribution") {
        std::vector<fields::CoordVectorField> spanning;
        for (int k = 1; cfg.has("field.span" + std::to_string(k)); ++k) {
            std::vector<expr::Expression> comps;
            for (const auto& s : cfg.list("field.span" + std::to_string(k))) {
                comps.push_back(expr::Expression::parse(s, param_names(chart.dim())));
            }
            if (static_cast<int>(comps.size()) != chart.dim()) {
                throw Error(ErrorCode::InvalidConfig, "field.span" + std::to_string(k) + ": needs one component per parameter");
            }
            spanning.push_back([comps](const VectorXd& u) {
                VectorXd v(static_cast<Eigen::Index>(comps.size()));
                for (std::size_t i = 0; i < comps.size(); ++i) {
                    v(static_cast<Eigen::Index>(i)) = comps[i](std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
                }
                return v;
            });
        }
        if (spanning.empty()) throw Error(ErrorCode::InvalidConfig, "field.span1: missing required key");
        out = OperatorField::distribution(chart, std::move(spanning));
    } else {
        throw Error(ErrorCode::InvalidConfig, "field.preset: unknown preset '" + preset + "'");
    }
    if (cfg.has("field.positivity")) out = out->with_positivity(cfg.integer("field.positivity", 0) != 0);
    return *out;
}

comparison::ComparisonProfile build_profile(const Config& cfg) {
    using comparison::AlphaFunction;
    using comparison::CurvatureFunction;
    const std::string kname = cfg.get("profile.curvature", "flat");
    std::optional<CurvatureFunction> k;
    if (kname == "flat") {
        k = CurvatureFunction::flat();
    } else if (kname == "hyperbolic") {
        k = CurvatureFunction::hyperbolic(cfg.number("profile.c"));
    } else if (kname == "spherical") {
        k = CurvatureFunction::spherical(cfg.number("profile.c"));
    } else if (kname == "constant") {
        k = CurvatureFunction::constant(cfg.number("profile.k"));
    } else if (kname == "table") {
        std::vector<double> t, v;
        if (cfg.has("profile.table_file")) {
            const std::string path = cfg.get("profile.table_file");
            std::ifstream in(path);
            if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                std::istringstream ls(line);
                double a = 0.0, b = 0.0;
                if (ls >> a >> b) {
                    t.push_back(a);
                    v.push_back(b);
                }
            }
        } else {
            t = cfg.numbers("profile.table_t");
            v = cfg.numbers("profile.table_k");
        }
        k = CurvatureFunction::table(t, v);
    } else {
        throw Error(ErrorCode::InvalidConfig, "profile.curvature: unknown preset '" + kname + "'");
    }

    const std::string aname = cfg.get("profile.alpha", "zero");
    std::optional<AlphaFunction> a;
    if (aname == "zero") {
        a = AlphaFunction::zero();
    } else if (aname == "constant") {
        a = AlphaFunction::constant(cfg.number("profile.kappa"));
    } else if (aname == "inverse_shifted") {
        a = AlphaFunction::inverse_shifted(cfg.number("profile.eps"));
    } else if (aname == "scaled") {
        a = AlphaFunction::scaled(static_cast<int>(cfg.integer("profile.alpha_m", 2)), cfg.number("profile.alpha_c"));
    } else {
        throw Error(ErrorCode::InvalidConfig, "profile.alpha: unknown preset '" + aname + "'");
    }
    const double mu_max = cfg.number("run.mu_max", 0.0);
    const double t_max = cfg.number("profile.t_max", std::max(10.0, 2.0 * mu_max + 1.0));
    return comparison::solve_profile(*k, *a, t_max, cfg.number("profile.step", 0.01));
}

Report run_scenario(const Config& input, const RunOverrides& overrides) {
    Config cfg = resolve(input);
    if (overrides.seed) cfg.set("run.seed", std::to_string(*overrides.seed));
    if (overrides.resolution) cfg.set("run.resolution", std::to_string(*overrides.resolution));
    if (overrides.mu_max) {
        std::ostringstream os;
        os.precision(17);
        os << *overrides.mu_max;
        cfg.set("run.mu_max", os.str());
    }
    const std::string label = cfg.get("scenario", "custom");
    try {
        const Plan plan = read_plan(cfg);
        const ImmersionChart chart = build_chart(cfg);
        const OperatorField phi = build_field(cfg, chart);
        const auto profile = build_profile(cfg);
        const auto unused = cfg.unused();
        if (!unused.empty()) {
            std::string list;
            for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
            throw Error(ErrorCode::InvalidConfig, "unknown keys: " + list);
        }

        Report report;
        report.kind = "scenario";
        report.scenario = plan.scenario;
        report.config_hash = cfg.hash();
        report.resolution = plan.resolution;
        report.mu_max = plan.mu_max;
        report.seed = plan.seed;

        std::mt19937_64 rng(plan.seed);
        const std::vector<VectorXd> points = sample_points(chart, rng, plan.samples);
        for (const auto& id : plan.identities) {
            const std::string name = "identity." + id;
            report.checks.push_back(timed([&] {
                if (id == "flat_radial") return flat_radial_suite(name, {phi}, points);
                if (id == "comparison_equality") return comparison_equality_suite(name, {phi}, points);
                if (id == "newton_divergence") return newton_divergence_suite(name, {chart}, {points});
                if (id == "divergence_expansion") return expansion_suite(name, {phi}, points, rng);
                return foliation_suite(name, phi, points, 1e-3);
            }));
        }
        if (plan.growth) append_growth(report, plan, phi, profile);
        return report;
    } catch (const Error& e) {
        std::string msg = e.what();
        const std::string prefix = std::string(to_string(e.code())) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
        throw Error(e.code(), "scenario '" + label + "': " + msg);
    }
}

Report run_profile(const Config& input) {
    const Config cfg = resolve(input);
    const auto p = build_profile(cfg);
    Report r;
    r.kind = "profile";
    r.scenario = cfg.get("scenario", "custom");
    r.config_hash = cfg.hash();
    r.mu_max = cfg.number("run.mu_max", 0.0);
    CheckResult c;
    c.name = "profile";
    c.verdict = true;
    c.metrics = {{"r0", p.r0().value()},
                 {"mu_bound", p.mu_bound().value()},
                 {"t_end", p.t_end()},
                 {"step", p.step()},
                 {"truncated", p.truncated() ? 1.0 : 0.0}};
    c.detail = "curvature " + p.curvature().describe() + ", alpha " + p.alpha().describe();
    r.checks.push_back(c);
    CurveTable t{"profile", {"t", "h", "dh", "gap"}, {}};
    for (std::size_t i = 0; i < p.grid().size(); ++i) {
        const double ti = p.grid()[i];
        const double gap = ti > 0.0 && p.grid_h()[i] > 0.0 ? p.grid_dh()[i] / p.grid_h()[i] - p.alpha()(ti) : kNaN;
        t.rows.push_back({ti, p.grid_h()[i], p.grid_dh()[i], gap});
    }
    r.curves.push_back(t);
    return r;
}

std::vector<CheckResult> symop_suite(std::span<const symop::SymOp> ops) {
    double trace = 0.0, eig = 0.0, comm = 0.0;
    int witness_failures = 0;
    for (const auto& t : ops) {
        const int m = t.dim();
        for (int j = 1; j <= m - 1; ++j) {
            trace = std::max(trace, symop::trace_identities(t, j).max());
            eig = std::max(eig, symop::eigen_identity_residual(t, j));
            comm = std::max(comm, symop::commutator_norm(symop::newton_operator(t, j), t) /
                                      std::pow(1.0 + t.frobenius_norm(), j + 1));
        }
        for (int j = 2; j <= m; ++j) {
            if (!symop::rank_bound_witness(t, j)) ++witness_failures;
        }
    }
    const double n = static_cast<double>(ops.size());
    return {
        {"symop.trace_identities", trace <= 1e-9, {{"max_relative_residual", trace}, {"operators", n}}, "", 0.0},
        {"symop.eigen_identity", eig <= 1e-8, {{"max_relative_residual", eig}, {"operators", n}}, "", 0.0},
        {"symop.commutator", comm <= 1e-9, {{"max_scaled_norm", comm}, {"operators", n}}, "", 0.0},
        {"symop.rank_witness", witness_failures == 0, {{"failures", static_cast<double>(witness_failures)}, {"operators", n}}, "", 0.0},
    };
}

Report verify_identities(const VerifyOptions& options) {
    if (options.count < 1) throw Error(ErrorCode::InvalidConfig, "count must be at least 1");
    if (options.dims.empty()) throw Error(ErrorCode::InvalidConfig, "dims must not be empty");
    for (int m : options.dims) {
        if (m < 2 || m > 12) throw Error(ErrorCode::InvalidConfig, "dims must lie in 2..12");
    }
    Report report;
    report.kind = "verify";
    report.seed = options.seed;
    {
        std::ostringstream os;
        os << "count=" << options.count << ";dims=";
        for (int m : options.dims) os << m << " ";
        os << ";semidefinite=" << options.semidefinite_count << ";points=" << options.field_points;
        Config c;
        c.set("verify", os.str());
        report.config_hash = c.hash();
    }
    std::mt19937_64 rng(options.seed);

    const auto start = std::chrono::steady_clock::now();
    std::vector<symop::SymOp> ops;
    ops.reserve(static_cast<std::size_t>(options.count));
    for (int n = 0; n < options.count; ++n) {
        ops.push_back(random_symmetric(rng, options.dims[static_cast<std::size_t>(n) % options.dims.size()]));
    }
    auto suite = symop_suite(ops);
    const double symop_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& c : suite) {
        c.runtime_s = symop_time / static_cast<double>(suite.size());
        report.checks.push_back(c);
    }
    report.checks.push_back(timed([&] { return semidefinite_suite(rng, options.dims, options.semidefinite_count); }));

    namespace ch = geometry::charts;
    const int n = options.field_points;
    report.checks.push_back(timed([&] {
        std::vector<ImmersionChart> list{ch::cylinder(), ch::sphere(), ch::catenoid()};
        std::vector<std::vector<VectorXd>> pts;
        for (const auto& c : list) pts.push_back(sample_points(c, rng, n));
        return newton_divergence_suite("fields.newton_divergence", list, pts);
    }));
    report.checks.push_back(timed([&] {
        const auto chart = ch::catenoid();
        const auto pts = sample_points(chart, rng, 2 * n);
        const ScalarField lam([](const VectorXd& u) { return 1.5 + std::sin(u(0)) * std::cos(u(1)); });
        return flat_radial_suite("fields.flat_radial",
                                 {OperatorField::identity(chart), OperatorField::newton(chart, 1),
                                  OperatorField::lambda_identity(chart, lam)},
                                 pts);
    }));
    report.checks.push_back(timed([&] {
        const auto euclid = ch::catenoid();
        auto c1 = comparison_equality_suite("fields.comparison_equality_euclidean", {OperatorField::identity(euclid)},
                                            sample_points(euclid, rng, 2 * n));
        const auto hyp = ch::hyperbolic_plane(1.0, 5.0);
        auto c2 = comparison_equality_suite("fields.comparison_equality_hyperbolic", {OperatorField::identity(hyp)},
                                            sample_points(hyp, rng, 2 * n));
        CheckResult c;
        c.name = "fields.comparison_equality";
        c.verdict = c1.verdict && c2.verdict;
        c.metrics = {{"max_scaled_residual_euclidean", c1.metric("max_scaled_residual")},
                     {"max_scaled_residual_hyperbolic", c2.metric("max_scaled_residual")}};
        return c;
    }));
    report.checks.push_back(timed([&] {
        std::vector<OperatorField> presets;
        std::vector<VectorXd> pts;
        CheckResult total;
        total.name = "fields.divergence_expansion";
        total.verdict = true;
        double wa = 0.0, wb = 0.0, wc = 0.0;
        for (const auto& chart : {ch::catenoid(), ch::sphere(1.3), ch::helicoid(), ch::hyperbolic_plane()}) {
            const ScalarField lam([](const VectorXd& u) { return 1.2 + std::sin(u(0) + 0.5 * u(1)); });
            auto c = expansion_suite("", {OperatorField::identity(chart), OperatorField::lambda_identity(chart, lam),
                                            OperatorField::newton(chart, 1)},
                                       sample_points(chart, rng, std::max(1, n / 3)), rng);
            wa = std::max(wa, c.metric("max_r_a"));
            wb = std::max(wb, c.metric("max_r_b"));
            wc = std::max(wc, c.metric("max_r_c"));
            total.verdict = total.verdict && c.verdict;
        }
        total.metrics = {{"max_r_a", wa}, {"max_r_b", wb}, {"max_r_c", wc}};
        return total;
    }));
    report.checks.push_back(timed([&] {
        const auto graph = ch::graph("graph", [](double x, double) { return x * x; });
        const auto field = OperatorField::distribution(graph, {[](const VectorXd&) {
                                                           VectorXd v(2);
                                                           v << 1.0, 0.0;
                                                           return v;
                                                       }});
        return foliation_suite("fields.foliation_graph", field, sample_points(graph, rng, n), 1e-3);
    }));
    return report;
}

} // namespace tracegrowth::cli
