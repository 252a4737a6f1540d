#include "tracegrowth/charts.hpp"
#include "tracegrowth/comparison.hpp"
#include "tracegrowth/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace tracegrowth;
using namespace tracegrowth::comparison;
using fields::OperatorField;
using fields::ScalarField;
namespace charts = tracegrowth::geometry::charts;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

ComparisonProfile flat() { return solve_profile(CurvatureFunction::flat(), AlphaFunction::zero(), 40.0, 0.01); }

} // namespace

TEST(Pointwise, EuclideanEquality) {
    auto prof = flat();
    for (const auto& chart : {charts::catenoid(), charts::sphere(1.0), charts::plane()}) {
        std::vector<OperatorField> presets{
            OperatorField::identity(chart),
            OperatorField::lambda_identity(chart, ScalarField([](const Eigen::VectorXd& u) { return 1 + u(0) * u(0); }))};
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (const auto& phi : presets) {
            for (int n = 0; n < 10; ++n) {
                Eigen::VectorXd u = chart.base_point() + vec({d(rng), d(rng)});
                if (geometry::ambient_distance(chart, u) < 1e-3) continue;
                const double tr = phi.mixed(u).trace();
                EXPECT_NEAR(pointwise_comparison_residual(phi, prof, u), 0.0, 1e-4 * (1 + tr)) << chart.name();
            }
        }
    }
}

TEST(Pointwise, HyperbolicEquality) {
    auto chart = charts::hyperbolic_plane(1.0, 5.0);
    auto prof = solve_profile(CurvatureFunction::hyperbolic(1.0), AlphaFunction::zero(), 8.0, 0.01);
    auto phi = OperatorField::identity(chart);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(-2.5, 2.5);
    for (int n = 0; n < 20; ++n) {
        Eigen::VectorXd u = vec({d(rng), d(rng)});
        const double r = u.norm();
        EXPECT_NEAR(pointwise_comparison_residual(phi, prof, u), 0.0, 1e-4 * (1 + 2 * std::cosh(r)));
    }
}

TEST(Pointwise, MismatchedProfileSigns) {
    auto chart = charts::plane();
    auto phi = OperatorField::identity(chart);
    auto hyp = solve_profile(CurvatureFunction::hyperbolic(1.0), AlphaFunction::zero(), 8.0, 0.01);
    auto sph = solve_profile(CurvatureFunction::spherical(1.0), AlphaFunction::zero(), 3.0, 0.01);
    for (double r : {0.5, 1.0, 2.0, 2.9}) {
        Eigen::VectorXd u = vec({0.6 * r, 0.8 * r});
        // div(h(r)/r x) - 2h'(r) on the plane
        EXPECT_NEAR(pointwise_comparison_residual(phi, hyp, u), std::sinh(r) / r - std::cosh(r), 1e-4);
        EXPECT_LT(pointwise_comparison_residual(phi, hyp, u), 0.0);
        EXPECT_NEAR(pointwise_comparison_residual(phi, sph, u), std::sin(r) / r - std::cos(r), 1e-4);
        EXPECT_GT(pointwise_comparison_residual(phi, sph, u), 0.0);
    }
}

TEST(Pointwise, OutsideProfileDomain) {
    auto chart = charts::plane();
    auto sph = solve_profile(CurvatureFunction::spherical(1.0), AlphaFunction::zero(), 5.0, 0.01);
    try {
        pointwise_comparison_residual(OperatorField::identity(chart), sph, vec({3.5, 0.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ProfileDomain);
    }
}

TEST(Domain, PlaneIdentity) {
    auto chart = charts::plane(8.0);
    auto ball = ballgrowth::mesh_and_distance(chart, {128, true});
    auto phi = OperatorField::identity(chart);
    for (double mu : {2.0, 4.0, 6.0}) {
        DomainComparison d = domain_comparison_check(phi, flat(), ball, mu);
        EXPECT_NEAR(d.rhs, 2 * M_PI * mu * mu, 0.05 * 2 * M_PI * mu * mu);
        EXPECT_LE(std::abs(d.slack), 0.05 * d.rhs) << mu;
        EXPECT_GE(d.shell_nodes, 8);
    }
}

TEST(Domain, MinimalSurface) {
    auto chart = charts::catenoid(3.0);
    auto ball = ballgrowth::mesh_and_distance(chart, {192, true});
    auto phi = OperatorField::identity(chart);
    for (double mu : {1.5, 3.0, 5.0}) {
        DomainComparison d = domain_comparison_check(phi, flat(), ball, mu);
        EXPECT_GE(d.slack, -0.05 * std::abs(d.rhs)) << mu;
    }
}

TEST(Domain, ZeroTrace) {
    auto chart = charts::plane(8.0);
    auto ball = ballgrowth::mesh_and_distance(chart, {64, true});
    auto phi = OperatorField::lambda_identity(chart, ScalarField::constant(0.0));
    DomainComparison d = domain_comparison_check(phi, flat(), ball, 3.0);
    EXPECT_EQ(d.lhs, 0.0);
    EXPECT_EQ(d.rhs, 0.0);
}

TEST(Domain, TooCoarse) {
    auto chart = charts::plane(8.0);
    auto ball = ballgrowth::mesh_and_distance(chart, {32, true});
    auto phi = OperatorField::identity(chart);
    for (double mu : {0.3, 7.9}) {
        try {
            domain_comparison_check(phi, flat(), ball, mu);
            ADD_FAILURE() << mu;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InsufficientResolution);
        }
    }
}
