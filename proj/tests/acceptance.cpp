// Prints one PASS/FAIL line per acceptance criterion; nonzero exit on any FAIL.
#include "tracegrowth/charts.hpp"
#include "tracegrowth/comparison.hpp"
#include "tracegrowth/error.hpp"
#include "tracegrowth/fields.hpp"
#include "tracegrowth/growth.hpp"
#include "tracegrowth/scenario.hpp"
#include "tracegrowth/symop.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace tracegrowth;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using fields::OperatorField;
namespace charts = tracegrowth::geometry::charts;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

// S_j by expanding prod (1 + x_i t)
std::vector<double> elementary(const std::vector<double>& x) {
    std::vector<double> s(x.size() + 1, 0.0);
    s[0] = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j >= 1; --j) s[j] += x[i] * s[j - 1];
    }
    return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

MatrixXd random_symmetric(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatrixXd a(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) a(i, j) = u(rng);
    }
    return 0.5 * (a + a.transpose());
}

std::vector<VectorXd> points(const geometry::ImmersionChart& chart, std::mt19937_64& rng, int n, double min_r = 0.05) {
    const auto& d = chart.domain();
    std::vector<VectorXd> out;
    while (static_cast<int>(out.size()) < n) {
        VectorXd u(d.dim());
        for (int a = 0; a < d.dim(); ++a) {
            const double half = 0.5 * (d.upper(a) - d.lower(a)) * (d.periodic[static_cast<std::size_t>(a)] ? 1.0 : 0.8);
            const double mid = 0.5 * (d.upper(a) + d.lower(a));
            u(a) = std::uniform_real_distribution<double>(mid - half, mid + half)(rng);
        }
        if (geometry::ambient_distance(chart, u) > min_r) out.push_back(u);
    }
    return out;
}

// 1. trace and spectral identities of the Newton operators, against eigenvalue-side oracles
Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const int m = 2 + n % 5;
        const MatrixXd a = random_symmetric(rng, m);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
        std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + m);
        const auto s = elementary(ev);
        auto sj = [&](int j) { return j <= m ? s[static_cast<std::size_t>(j)] : 0.0; };
        const symop::SymOp op(a);
        for (int j = 1; j <= m - 1; ++j) {
            const MatrixXd p = symop::newton_operator(op, j).matrix();
            worst = std::max(worst, rel(p.trace(), (m - j) * sj(j)));
            worst = std::max(worst, rel((a * p).trace(), (j + 1) * sj(j + 1)));
            worst = std::max(worst, rel((a * a * p).trace(), sj(1) * sj(j + 1) - (j + 2) * sj(j + 2)));
            for (int k = 0; k < m; ++k) {
                std::vector<double> rest = ev;
                rest.erase(rest.begin() + k);
                const double expect = elementary(rest)[static_cast<std::size_t>(j)];
                const VectorXd v = es.eigenvectors().col(k);
                worst = std::max(worst, (p * v - expect * v).norm() / std::max(1.0, std::abs(expect)));
            }
        }
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && t < 5.0, fmt("max relative residual %.3g over 1000 operators, %.2f s", worst, t)};
}

// 2. operators with S_{j+1} = 0 by construction are never classified indefinite
Outcome criterion2() {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int built = 0, indefinite = 0;
    while (built < 200) {
        const int m = 2 + built % 5;
        const int j = 1 + built % (m - 1);
        // pick m-1 eigenvalues freely, solve S_{j+1}(x, y) = S_{j+1}(x) + y S_j(x) = 0 for y
        std::vector<double> ev(static_cast<std::size_t>(m - 1));
        for (auto& x : ev) x = u(rng);
        const auto s = elementary(ev);
        const double sj = s[static_cast<std::size_t>(j)];
        if (std::abs(sj) < 1e-2) continue;
        const double sj1 = j + 1 <= m - 1 ? s[static_cast<std::size_t>(j + 1)] : 0.0;
        ev.push_back(-sj1 / sj);
        const MatrixXd q = random_symmetric(rng, m).householderQr().householderQ();
        const MatrixXd a = q * Eigen::Map<VectorXd>(ev.data(), m).asDiagonal() * q.transpose();
        const symop::SymOp p = symop::newton_operator(symop::SymOp(a), j);
        if (symop::semidefinite_class(p, 1e-9) == symop::Definiteness::Indefinite) ++indefinite;
        ++built;
    }
    return {indefinite == 0, fmt("%g of %g constructed operators indefinite", indefinite, built)};
}

// 3. div P_1(A) on three surfaces
Outcome criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(13);
    double worst = 0.0;
    for (const auto& chart : {charts::cylinder(), charts::sphere(1.0), charts::catenoid()}) {
        const auto shape = OperatorField::shape_operator(chart);
        for (const auto& u : points(chart, rng, 50)) {
            const auto s = fields::sample(shape, u);
            double grad = 0.0;
            for (const auto& c : s.covariant) grad += c.squaredNorm();
            const double scale = 1.0 + s.mixed.norm() * std::sqrt(grad);
            worst = std::max(worst, fields::newton_divergence_check(chart, 1, u) / scale);
        }
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-3 && t < 10.0, fmt("max scaled |div P1| %.3g at 150 points, %.2f s", worst, t)};
}

// 4. D_Phi(Y) = tr Phi for Y = position vector in flat ambient
Outcome criterion4() {
    std::mt19937_64 rng(14);
    double worst = 0.0;
    const auto chart = charts::catenoid();
    const fields::ScalarField lam([](const VectorXd& u) { return 2.0 + std::cos(u(0)) * std::tanh(u(1)); });
    const std::vector<OperatorField> presets{OperatorField::identity(chart), OperatorField::newton(chart, 1),
                                             OperatorField::lambda_identity(chart, lam)};
    const auto pts = points(chart, rng, 100);
    for (const auto& phi : presets) {
        for (const auto& u : pts) {
            const VectorXd q = chart.base_image();
            const geometry::ChartVectorField y = [chart, q](const VectorXd& v) -> VectorXd { return chart(v) - q; };
            const double tr = fields::sample(phi, u).trace;
            worst = std::max(worst, std::abs(fields::phi_divergence(phi, y, u) - tr) / std::max(1.0, std::abs(tr)));
        }
    }
    return {worst <= 1e-4, fmt("max relative residual %.3g over 100 points x 3 fields", worst)};
}

// 5. equality case of the comparison: h = t in R^3, h = sinh t in H^3
Outcome criterion5() {
    std::mt19937_64 rng(15);
    double worst_e = 0.0, worst_h = 0.0;
    {
        const auto chart = charts::catenoid();
        const auto phi = OperatorField::identity(chart);
        const auto prof = comparison::solve_profile(comparison::CurvatureFunction::flat(),
                                                    comparison::AlphaFunction::zero(), 40.0, 0.01);
        for (const auto& u : points(chart, rng, 100)) {
            const double tr = fields::sample(phi, u).trace;
            worst_e = std::max(worst_e, std::abs(comparison::pointwise_comparison_residual(phi, prof, u)) / (1.0 + tr));
        }
    }
    {
        const auto chart = charts::hyperbolic_plane(1.0, 5.0);
        const auto phi = OperatorField::identity(chart);
        const auto prof = comparison::solve_profile(comparison::CurvatureFunction::hyperbolic(1.0),
                                                    comparison::AlphaFunction::zero(), 8.0, 0.01);
        for (const auto& u : points(chart, rng, 100)) {
            const double r = u.norm(); // normal coordinates
            worst_h = std::max(worst_h, std::abs(comparison::pointwise_comparison_residual(phi, prof, u)) /
                                            (1.0 + 2.0 * std::cosh(r)));
        }
    }
    return {std::max(worst_e, worst_h) <= 1e-3, fmt("max scaled residual %.3g (R^3), %.3g (H^3)", worst_e, worst_h)};
}

// 6. profile closed forms and admissible radii
Outcome criterion6() {
    using comparison::AlphaFunction;
    using comparison::CurvatureFunction;
    const auto t0 = std::chrono::steady_clock::now();
    double err = 0.0;
    const auto flat = comparison::solve_profile(CurvatureFunction::flat(), AlphaFunction::zero(), 5.0, 0.01);
    const auto hyp = comparison::solve_profile(CurvatureFunction::hyperbolic(1.0), AlphaFunction::zero(), 5.0, 0.01);
    const auto sph = comparison::solve_profile(CurvatureFunction::spherical(1.0), AlphaFunction::zero(), kPi, 0.01);
    for (int i = 0; i <= 500; ++i) {
        const double t = 0.01 * i;
        err = std::max({err, std::abs(flat.h(t) - t), std::abs(hyp.h(t) - std::sinh(t)) / std::cosh(t)});
        if (t <= kPi) err = std::max(err, std::abs(sph.h(t) - std::sin(t)));
    }
    const auto unb = comparison::solve_profile(CurvatureFunction::flat(), AlphaFunction::inverse_shifted(0.5), 20.0, 0.01);
    bool ok = !unb.mu_bound().is_finite();
    double mu_err = 0.0;
    for (double c : {0.5, 1.0, 2.0}) {
        for (double kappa : {0.25, 1.0, 3.0}) {
            const auto p = comparison::solve_profile(CurvatureFunction::spherical(c), AlphaFunction::constant(kappa),
                                                     kPi / c + 0.1, 0.001);
            mu_err = std::max(mu_err, std::abs(p.mu_bound().value() - std::atan(c / kappa) / c));
        }
    }
    const double t = seconds_since(t0);
    ok = ok && err <= 1e-6 && mu_err <= 1e-4 && t < 1.0;
    return {ok, fmt("closed-form error %.3g, mu bound error %.3g, %.3f s", err, mu_err, t) +
                    (unb.mu_bound().is_finite() ? ", inverse_shifted bound finite" : ", inverse_shifted bound unbounded")};
}

double interp(const std::vector<double>& x, const std::vector<double>& y, double at) {
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - x.begin()), 1, x.size() - 1);
    const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - w) * y[i - 1] + w * y[i];
}

struct Run {
    cli::Report report;
    std::vector<double> mu, f;
    double seconds = 0.0;
};

std::map<std::string, Run>& runs() {
    static std::map<std::string, Run> cache;
    return cache;
}

const Run& run(const std::string& name) {
    auto& cache = runs();
    if (auto it = cache.find(name); it != cache.end()) return it->second;
    const auto t0 = std::chrono::steady_clock::now();
    Run r;
    r.report = cli::run_scenario(cli::builtin_scenario(name));
    r.seconds = seconds_since(t0);
    for (const auto& c : r.report.curves) {
        if (c.name != "curve") continue;
        for (const auto& row : c.rows) {
            r.mu.push_back(row[0]);
            r.f.push_back(row[1]);
        }
    }
    return cache.emplace(name, std::move(r)).first->second;
}

// Lambda (mu - mu0) with Lambda = G(mu0) / h(mu0); flat, alpha = 0 makes G = f and h = t.
double linear_margin(const Run& r, double mu0, double slack) {
    const double lambda = interp(r.mu, r.f, mu0) / mu0;
    double worst = INFINITY;
    for (std::size_t i = 0; i < r.mu.size(); ++i) {
        if (r.mu[i] < mu0) continue;
        const double bound = lambda * (r.mu[i] - mu0);
        worst = std::min(worst, r.f[i] - bound * (1.0 - slack));
    }
    return worst;
}

// 7. cylinder with P_1: slope 4 pi, linear bound
Outcome criterion7() {
    const Run& r = run("cylinder_newton");
    const double mu_max = r.mu.back();
    const double mu0 = 0.1 * mu_max;
    // least-squares slope of f on [5, 15]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < r.mu.size(); ++i) {
        if (r.mu[i] < 5.0 || r.mu[i] > 15.0) continue;
        sx += r.mu[i];
        sy += r.f[i];
        sxx += r.mu[i] * r.mu[i];
        sxy += r.mu[i] * r.f[i];
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double ratio = slope / (4.0 * kPi);
    const double margin = linear_margin(r, mu0, 0.0);
    const auto* th = r.report.find("theorem.linear_growth");
    const bool ok = std::abs(ratio - 1.0) <= 0.10 && margin >= 0.0 && th && th->verdict && r.seconds < 60.0 &&
                    r.report.resolution == 256;
    return {ok, fmt("slope/4pi %.4f, min f - Lambda(mu-mu0) %.3g, run %.1f s", ratio, margin, r.seconds)};
}

// 8. catenoid, identity field
Outcome criterion8() {
    const Run& r = run("catenoid");
    const double mu0 = 0.1 * r.mu.back();
    const double margin = linear_margin(r, mu0, 0.07);
    double tail = INFINITY;
    for (std::size_t i = 0; i < r.mu.size(); ++i) {
        if (r.mu[i] >= 0.6 * r.mu.back()) tail = std::min(tail, r.f[i] / r.mu[i]);
    }
    const auto* th = r.report.find("theorem.lambda_bound");
    const bool ok = margin >= 0.0 && tail > 0.0 && th && th->verdict;
    return {ok, fmt("min f - 0.93 Lambda(mu-mu0) %.3g, tail min f/mu %.3f", margin, tail)};
}

// 9. H^2 with lambda = e^{-r}
Outcome criterion9() {
    const Run& r = run("h2_lambda_exp");
    const auto* maj = r.report.find("hypothesis.scalar_bound");
    const auto* rate = r.report.find("theorem.rate_closed_form");
    // f = int 2 lambda on a surface; int_{B_mu} e^{-r} = 2 pi int_0^mu e^{-t} sinh t dt
    double worst = 0.0;
    for (std::size_t i = 0; i < r.mu.size(); ++i) {
        const double mu = r.mu[i];
        if (mu < 0.5) continue;
        const double exact = 2.0 * kPi * (0.5 * mu - 0.25 * (1.0 - std::exp(-2.0 * mu)));
        worst = std::max(worst, std::abs(0.5 * r.f[i] / exact - 1.0));
    }
    const bool ok = maj && maj->verdict && maj->metric("min_margin") >= -1e-3 && worst <= 0.15 && rate && rate->verdict;
    return {ok, fmt("scalar_bound margin %.3g, worst relative error of int lambda %.3g, rate bound margin %.3g",
                    maj ? maj->metric("min_margin") : NAN, worst, rate ? rate->metric("min_relative_margin") : NAN)};
}

// 10. foliation identity on the two foliation scenarios
Outcome criterion10() {
    std::mt19937_64 rng(20);
    double worst[2] = {0.0, 0.0};
    const char* names[2] = {"graph_foliation", "plane_foliation"};
    for (int k = 0; k < 2; ++k) {
        const auto cfg = cli::builtin_scenario(names[k]);
        const auto chart = cli::build_chart(cfg);
        const auto field = cli::build_field(cfg, chart);
        for (const auto& u : points(chart, rng, 50)) {
            worst[k] = std::max(worst[k], fields::foliation_identity_residual(field, u).residual);
        }
    }
    return {worst[0] <= 1e-3 && worst[1] <= 1e-6, fmt("max residual %.3g (graph), %.3g (plane)", worst[0], worst[1])};
}

// 11. F >= G, F >= m G and G >= bound wherever the hypotheses hold
Outcome criterion11() {
    bool ok = true;
    std::string detail;
    int used = 0;
    for (const auto& name : cli::builtin_scenarios()) {
        const auto& rep = run(name).report;
        auto passed = [&](const std::string& c) {
            const auto* p = rep.find(c);
            return p && p->verdict;
        };
        if (!passed("hypothesis.psd") || !passed("hypothesis.alpha_bound")) continue;
        ++used;
        bool here = passed("fg.f_geq_g") && passed("fg.g_geq_bound");
        if (passed("hypothesis.radial_bound")) here = here && passed("fg.f_geq_mg");
        if (!here) detail += " " + name;
        ok = ok && here;
    }
    return {ok && used > 0, std::to_string(used) + " scenarios checked" + (detail.empty() ? "" : ", failing:" + detail)};
}

} // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10, criterion11};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
