#include "tracegrowth/growth.hpp"

#include "tracegrowth/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tracegrowth::ballgrowth {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
double integrate(F&& f, double a, double b) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-12);
}

const HypothesisReport* find_report(const std::vector<HypothesisReport>& reports, HypothesisKind kind) {
    for (const auto& r : reports) {
        if (r.kind == kind) return &r;
    }
    return nullptr;
}

void require(const std::vector<HypothesisReport>& reports, HypothesisKind kind, TheoremId id) {
    const HypothesisReport* r = find_report(reports, kind);
    std::ostringstream os;
    os << to_string(id) << " needs hypothesis " << to_string(kind);
    if (r == nullptr) {
        os << ", which was not checked";
        throw Error(ErrorCode::HypothesisViolated, os.str());
    }
    if (!r->verdict) {
        os << "; it fails with margin " << r->min_margin << " at u = (" << r->worst_u(0) << ", "
           << r->worst_u(1) << ")";
        throw Error(ErrorCode::HypothesisViolated, os.str());
    }
}

double valid_limit(const GrowthCurve& curve, const comparison::ComparisonProfile& profile) {
    return std::min(profile.mu_bound().value(), curve.mu.back());
}

} // namespace

double GrowthCurve::f_at(double m) const {
    if (m <= mu.front()) return f.front();
    if (m >= mu.back()) return f.back();
    const auto it = std::upper_bound(mu.begin(), mu.end(), m);
    const auto i = static_cast<std::size_t>(it - mu.begin());
    const double w = (m - mu[i - 1]) / (mu[i] - mu[i - 1]);
    return (1.0 - w) * f[i - 1] + w * f[i];
}

GrowthCurve growth_curve(const MeshedBall& ball, const fields::OperatorField& phi,
                         const comparison::ComparisonProfile& profile, const GrowthOptions& options) {
    const double mu_max = options.mu_max;
    if (!(mu_max > 0.0)) throw Error(ErrorCode::InvalidConfig, "mu_max must be positive");
    const double step = 2.0 * ball.spacing();
    if (mu_max + ball.spacing() > ball.max_radius()) {
        std::ostringstream os;
        os << "mu_max = " << mu_max << " exceeds the meshed radius " << ball.max_radius();
        throw Error(ErrorCode::InsufficientResolution, os.str());
    }
    GrowthCurve c;
    c.dim = ball.chart().dim();
    c.mu0 = options.mu0.value_or(0.1 * mu_max);
    if (!(c.mu0 > 0.0) || c.mu0 >= mu_max) throw Error(ErrorCode::InvalidConfig, "need 0 < mu0 < mu_max");

    const auto& nodes = ball.nodes();
    std::vector<double> tr(nodes.size(), 0.0), htr(nodes.size(), 0.0), gtr(nodes.size(), 0.0);
    const double reach = mu_max + ball.spacing();
    const auto& alpha = profile.alpha();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& n = nodes[k];
        if (n.rho > reach) continue;
        if (!profile.in_domain(n.r)) {
            std::ostringstream os;
            os << "node at r = " << n.r << " outside the profile domain [0, " << profile.t_end()
               << "], r0 = " << profile.r0().describe();
            throw Error(ErrorCode::ProfileDomain, os.str());
        }
        const Eigen::VectorXd u = n.u;
        tr[k] = phi.mixed(u).trace();
        const double h = profile.h(n.r);
        htr[k] = h * tr[k];
        gtr[k] = (profile.dh(n.r) - alpha(n.r) * h) * tr[k];
    }

    const int count = std::max(2, static_cast<int>(std::ceil(mu_max / step)));
    for (int i = 0; i <= count; ++i) {
        const double m = mu_max * i / count;
        c.mu.push_back(m);
        c.f.push_back(ball.ball_integral(tr, m));
        c.K.push_back(ball.ball_integral(htr, m));
        c.G.push_back(ball.ball_integral(gtr, m));
    }
    const std::size_t n = c.mu.size();
    c.F.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? i : i + 1;
        c.F[i] = (c.K[hi] - c.K[lo]) / (c.mu[hi] - c.mu[lo]);
    }

    c.trace_at_base = phi.mixed(ball.chart().base_point()).trace();
    if (options.require_lambda && !(c.trace_at_base > 0.0)) {
        throw Error(ErrorCode::HypothesisViolated,
                    "tr Phi(q0) = " + std::to_string(c.trace_at_base) + " is not positive");
    }
    c.G_mu0 = ball.ball_integral(gtr, c.mu0);
    c.lambda = c.G_mu0 / profile.h(c.mu0);

    c.tail_lo = 0.6 * mu_max;
    c.tail_hi = mu_max;
    c.rate_log = std::numeric_limits<double>::infinity();
    c.rate_linear = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (c.mu[i] < c.tail_lo) continue;
        c.rate_linear = std::min(c.rate_linear, c.f[i] / c.mu[i]);
        if (c.mu[i] > 1.0) c.rate_log = std::min(c.rate_log, c.f[i] / std::log(c.mu[i]));
    }
    if (!std::isfinite(c.rate_log)) c.rate_log = kNaN;
    return c;
}

std::string_view to_string(HypothesisKind kind) {
    switch (kind) {
        case HypothesisKind::Psd: return "psd";
        case HypothesisKind::AlphaBound: return "alpha_bound";
        case HypothesisKind::RadialBound: return "radial_bound";
        case HypothesisKind::ScalarBound: return "scalar_bound";
        case HypothesisKind::EndBound: return "end_bound";
    }
    return "unknown";
}

std::vector<HypothesisReport> hypothesis_check(const MeshedBall& ball, const fields::OperatorField& phi,
                                               const comparison::ComparisonProfile& profile,
                                               const std::vector<HypothesisSpec>& specs, double radius,
                                               double tol) {
    std::vector<HypothesisReport> reports;
    for (const auto& s : specs) {
        const bool lambda_kind = s.kind == HypothesisKind::ScalarBound || s.kind == HypothesisKind::EndBound;
        if (lambda_kind && !phi.lambda()) {
            throw Error(ErrorCode::InvalidConfig,
                        std::string(to_string(s.kind)) + " needs a lambda_identity field");
        }
        HypothesisReport r;
        r.kind = s.kind;
        r.margins.assign(ball.nodes().size(), kNaN);
        r.min_margin = std::numeric_limits<double>::infinity();
        reports.push_back(std::move(r));
    }
    if (specs.empty()) return reports;

    const auto& chart = ball.chart();
    const auto& amb = chart.ambient();
    const int m = chart.dim();
    const auto& nodes = ball.nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& n = nodes[k];
        if (n.rho > radius) continue;
        const Eigen::VectorXd u = n.u;
        const fields::FieldSample smp = fields::sample(phi.with_positivity(false), u);
        const auto& f = smp.frame;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const HypothesisSpec& spec = specs[i];
            double lhs = 0.0;
            double rhs = 0.0;
            switch (spec.kind) {
                case HypothesisKind::Psd: {
                    const auto ev = symop::spectrum(smp.phi).eigenvalues;
                    lhs = -ev(0);
                    rhs = 0.0;
                    break;
                }
                case HypothesisKind::AlphaBound:
                    lhs = amb.norm(smp.mean_curvature + smp.divergence_ambient);
                    rhs = profile.alpha()(n.r) * smp.trace;
                    break;
                case HypothesisKind::RadialBound: {
                    double phi_grad = 0.0;
                    if (k != ball.base_node() && n.r > 0.0) {
                        const auto rd = geometry::ambient_radial(chart, f);
                        phi_grad = f.tangent_norm(smp.mixed * rd.grad_tangent_coords);
                    }
                    lhs = m * phi_grad;
                    rhs = smp.trace;
                    break;
                }
                case HypothesisKind::ScalarBound:
                case HypothesisKind::EndBound: {
                    const auto& lam = *phi.lambda();
                    const double l = lam(u);
                    const Eigen::VectorXd grad = f.to_ambient(f.inverse_metric * lam.partials(u));
                    lhs = amb.norm(l * f.mean_curvature_vector() + spec.p * grad);
                    rhs = spec.coefficient * l;
                    break;
                }
            }
            const double margin = (rhs - lhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
            HypothesisReport& rep = reports[i];
            rep.margins[k] = margin;
            ++rep.nodes_checked;
            if (margin < rep.min_margin) {
                rep.min_margin = margin;
                rep.worst_node = k;
                rep.worst_u = n.u;
            }
        }
    }
    for (auto& rep : reports) rep.verdict = rep.nodes_checked > 0 && rep.min_margin >= -tol;
    return reports;
}

std::string_view to_string(TheoremId id) {
    switch (id) {
        case TheoremId::LambdaBound: return "lambda_bound";
        case TheoremId::LogGrowth: return "log_growth";
        case TheoremId::LinearGrowth: return "linear_growth";
        case TheoremId::TraceBound: return "trace_bound";
        case TheoremId::RateClosedForm: return "rate_closed_form";
    }
    return "unknown";
}

std::optional<TheoremId> theorem_from_string(std::string_view name) {
    for (TheoremId id : {TheoremId::LambdaBound, TheoremId::LogGrowth, TheoremId::LinearGrowth, TheoremId::TraceBound,
                         TheoremId::RateClosedForm}) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

double trace_bound_integral(const comparison::ComparisonProfile& profile, int m, double mu) {
    const auto& alpha = profile.alpha();
    return m * integrate(
                   [&](double t) {
                       return std::pow(profile.h(t), m - 1) * std::exp(-m * alpha.integral(0.0, t));
                   },
                   0.0, mu);
}

BoundTable theorem_bound(const GrowthCurve& curve, const comparison::ComparisonProfile& profile, TheoremId id,
                         const std::vector<HypothesisReport>& hypotheses, double tol) {
    require(hypotheses, HypothesisKind::Psd, id);
    require(hypotheses, HypothesisKind::AlphaBound, id);
    const bool from_zero = id == TheoremId::TraceBound || id == TheoremId::RateClosedForm;
    if (from_zero) require(hypotheses, HypothesisKind::RadialBound, id);

    const auto& alpha = profile.alpha();
    const int m = curve.dim;
    if (id == TheoremId::LogGrowth && alpha.kind() != comparison::AlphaFunction::Kind::InverseShifted) {
        throw Error(ErrorCode::InvalidConfig, "log_growth needs alpha = inverse_shifted(eps)");
    }
    if (id == TheoremId::LinearGrowth && alpha.kind() != comparison::AlphaFunction::Kind::Zero) {
        throw Error(ErrorCode::InvalidConfig, "linear_growth needs alpha = zero");
    }
    double c = 0.0;
    if (id == TheoremId::RateClosedForm) {
        const auto k = profile.curvature().constant_value();
        if (!k || !(*k < 0.0)) throw Error(ErrorCode::InvalidConfig, "rate_closed_form needs K = -c^2 < 0");
        c = std::sqrt(-*k);
    }

    BoundTable t;
    t.id = id;
    t.window_lo = from_zero ? 0.0 : curve.mu0;
    t.window_hi = valid_limit(curve, profile);
    t.min_relative_margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 0; i < curve.mu.size(); ++i) {
        const double mu = curve.mu[i];
        t.mu.push_back(mu);
        const bool inside = mu >= t.window_lo && mu <= t.window_hi && (mu > 0.0);
        if (!inside) {
            t.bound.push_back(kNaN);
            t.margin.push_back(kNaN);
            continue;
        }
        double b = 0.0;
        switch (id) {
            case TheoremId::LambdaBound:
                b = curve.lambda *
                    integrate([&](double s) { return std::exp(-alpha.integral(curve.mu0, s)); }, curve.mu0, mu);
                break;
            case TheoremId::LogGrowth: {
                const double eps = alpha.parameter();
                b = curve.lambda * (curve.mu0 + eps) * std::log((mu + eps) / (curve.mu0 + eps));
                break;
            }
            case TheoremId::LinearGrowth: b = curve.lambda * (mu - curve.mu0); break;
            case TheoremId::TraceBound: b = curve.trace_at_base * trace_bound_integral(profile, m, mu); break;
            case TheoremId::RateClosedForm:
                b = m / std::pow(2.0 * c, m - 1) * curve.trace_at_base *
                    (mu - (m - 1) * (1.0 - std::exp(-2.0 * c * mu)) / (2.0 * c));
                break;
        }
        t.bound.push_back(b);
        t.margin.push_back(curve.f[i] - b);
        if (curve.f[i] - b < -tol * std::abs(b)) ok = false;
        if (std::abs(b) > 1e-12) t.min_relative_margin = std::min(t.min_relative_margin, (curve.f[i] - b) / std::abs(b));
    }
    t.satisfied = ok;
    return t;
}

FGReport fg_checks(const GrowthCurve& curve, const comparison::ComparisonProfile& profile, double tol) {
    FGReport r;
    r.worst_f_minus_g = r.worst_f_minus_mg = r.worst_g_minus_bound = std::numeric_limits<double>::infinity();
    const double hi = valid_limit(curve, profile);
    const double h0 = profile.h(curve.mu0);
    for (std::size_t i = 0; i < curve.mu.size(); ++i) {
        const double mu = curve.mu[i];
        if (mu < curve.mu0 || mu > hi) continue;
        const double g = curve.G[i];
        if (g > 0.0) {
            r.worst_f_minus_g = std::min(r.worst_f_minus_g, (curve.F[i] - g) / g);
            r.worst_f_minus_mg = std::min(r.worst_f_minus_mg, (curve.F[i] - curve.dim * g) / (curve.dim * g));
        }
        const double bound = curve.G_mu0 / h0 * profile.h(mu) * std::exp(-profile.alpha().integral(curve.mu0, mu));
        if (bound > 0.0) r.worst_g_minus_bound = std::min(r.worst_g_minus_bound, (g - bound) / bound);
    }
    r.f_geq_g = r.worst_f_minus_g >= -tol;
    r.f_geq_mg = r.worst_f_minus_mg >= -tol;
    r.g_geq_bound = r.worst_g_minus_bound >= -tol;
    return r;
}

EndBallEstimate end_ball_estimate(const MeshedBall& ball, const fields::ScalarField& lambda,
                                  const comparison::ComparisonProfile& profile, double mu) {
    if (!(profile.mu_bound() > mu) || !(mu > 0.0)) {
        throw Error(ErrorCode::ProfileDomain, "mu = " + std::to_string(mu) + " outside (0, mu_bound = " +
                                                  profile.mu_bound().describe() + ")");
    }
    if (mu + ball.spacing() > ball.max_radius()) {
        throw Error(ErrorCode::InsufficientResolution, "ball reaches the edge of the meshed region");
    }
    EndBallEstimate e;
    e.gamma = trace_bound_integral(profile, ball.chart().dim(), mu);
    e.bound = lambda(ball.chart().base_point()) * e.gamma;
    const auto& nodes = ball.nodes();
    std::vector<double> values(nodes.size(), 0.0);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k].rho <= mu + ball.spacing()) values[k] = lambda(Eigen::VectorXd(nodes[k].u));
    }
    e.measured = ball.ball_integral(values, mu);
    return e;
}

} // namespace tracegrowth::ballgrowth
