#include "tracegrowth/comparison.hpp"

#include "tracegrowth/error.hpp"

#include <cmath>

namespace tracegrowth::comparison {

double pointwise_comparison_residual(const fields::OperatorField& phi, const ComparisonProfile& profile,
                                     const Eigen::VectorXd& u) {
    const auto& chart = phi.chart();
    const double r = geometry::ambient_distance(chart, u);
    if (!profile.in_domain(r)) {
        throw Error(ErrorCode::ProfileDomain,
                    "r = " + std::to_string(r) + " outside the profile domain (r0 = " + profile.r0().describe() + ")");
    }
    const double d = fields::phi_divergence(phi, geometry::radial_field(chart, profile), u);
    return d - profile.dh(r) * phi.mixed(u).trace();
}

DomainComparison domain_comparison_check(const fields::OperatorField& phi, const ComparisonProfile& profile,
                                         const ballgrowth::MeshedBall& ball, double mu) {
    const double step = 2.0 * ball.spacing();
    if (!(mu > step)) throw Error(ErrorCode::InsufficientResolution, "mu below two mu-grid steps");
    if (mu + 2.0 * step > ball.max_radius()) {
        throw Error(ErrorCode::InsufficientResolution, "ball reaches the edge of the meshed region");
    }
    const auto& chart = phi.chart();
    const auto& nodes = ball.nodes();
    std::vector<double> flux(nodes.size(), 0.0);
    std::vector<double> volume(nodes.size(), 0.0);
    DomainComparison out;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& n = nodes[k];
        if (n.rho > mu + step + ball.spacing()) continue;
        if (std::abs(n.rho - mu) <= ball.spacing()) ++out.shell_nodes;
        const Eigen::VectorXd u = n.u;
        const fields::FieldSample s = fields::sample(phi, u);
        const double hr = profile.h(n.r);
        volume[k] = profile.dh(n.r) * s.trace -
                    hr * chart.ambient().norm(s.mean_curvature + s.divergence_ambient);
        if (k == ball.base_node() || n.r == 0.0) continue;
        const geometry::RadialData rd = geometry::ambient_radial(chart, s.frame);
        const Eigen::Vector2d grad_rho = n.metric.ldlt().solve(ball.rho_partials(k));
        const Eigen::VectorXd phi_grad_r = s.mixed * rd.grad_tangent_coords;
        flux[k] = hr * grad_rho.dot(s.frame.metric * phi_grad_r);
    }
    if (out.shell_nodes < 8) {
        throw Error(ErrorCode::InsufficientResolution,
                    "only " + std::to_string(out.shell_nodes) + " nodes on the sphere rho = mu");
    }
    out.lhs = (ball.ball_integral(flux, mu + step) - ball.ball_integral(flux, mu - step)) / (2.0 * step);
    out.rhs = ball.ball_integral(volume, mu);
    out.slack = out.lhs - out.rhs;
    return out;
}

} // namespace tracegrowth::comparison
