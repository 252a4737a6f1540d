#pragma once

#include "tracegrowth/fields.hpp"
#include "tracegrowth/mesh.hpp"
#include "tracegrowth/profile.hpp"

namespace tracegrowth::comparison {

/// D_Phi(h(r) grad r) - h'(r) tr Phi at u. ProfileDomain when r(u) leaves the profile.
double pointwise_comparison_residual(const fields::OperatorField& phi, const ComparisonProfile& profile,
                                     const Eigen::VectorXd& u);

struct DomainComparison {
    double lhs = 0.0;   // boundary flux of h(r) Phi grad r, via d/dmu of the ball integral
    double rhs = 0.0;   // int_B (h'(r) tr Phi - h(r) |H_Phi + div Phi|)
    double slack = 0.0; // lhs - rhs
    int shell_nodes = 0;
};

/// Integrated comparison on B_mu of the meshed ball. InsufficientResolution
/// when fewer than 8 nodes lie within one lattice spacing of the sphere rho = mu.
DomainComparison domain_comparison_check(const fields::OperatorField& phi, const ComparisonProfile& profile,
                                         const ballgrowth::MeshedBall& ball, double mu);

} // namespace tracegrowth::comparison
