#include "tracegrowth/charts.hpp"

#include "tracegrowth/error.hpp"

#include <cmath>
#include <numbers>

namespace tracegrowth::geometry::charts {

namespace {

using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;

ParamDomain box(VectorXd lower, VectorXd upper, std::vector<bool> periodic) {
    return {std::move(lower), std::move(upper), std::move(periodic)};
}

VectorXd vec2(double a, double b) {
    VectorXd v(2);
    v << a, b;
    return v;
}

VectorXd vec3(double a, double b, double c) {
    VectorXd v(3);
    v << a, b, c;
    return v;
}

// sinh(x)/x without the cancellation at x = 0.
double sinhc(double x) {
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sinh(x) / x;
}

} // namespace

ImmersionChart plane(double half_width, ChartOptions options) {
    return {"plane", AmbientSpace::euclidean(3),
            box(vec2(-half_width, -half_width), vec2(half_width, half_width), {false, false}),
            [](const VectorXd& u) { return vec3(u(0), u(1), 0.0); }, vec2(0.0, 0.0), options};
}

ImmersionChart cylinder(double radius, double half_height, ChartOptions options) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "cylinder radius must be positive");
    return {"cylinder", AmbientSpace::euclidean(3),
            box(vec2(0.0, -half_height), vec2(2 * kPi, half_height), {true, false}),
            [radius](const VectorXd& u) {
                return vec3(radius * std::cos(u(0)), radius * std::sin(u(0)), u(1));
            },
            vec2(0.0, 0.0), options};
}

ImmersionChart sphere(double radius, ChartOptions options) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "sphere radius must be positive");
    return {"sphere", AmbientSpace::euclidean(3),
            box(vec2(0.05, 0.0), vec2(kPi - 0.05, 2 * kPi), {false, true}),
            [radius](const VectorXd& u) {
                const double st = std::sin(u(0));
                return vec3(radius * st * std::cos(u(1)), radius * st * std::sin(u(1)),
                            radius * std::cos(u(0)));
            },
            vec2(kPi / 2, 0.0), options};
}

ImmersionChart catenoid(double v_max, ChartOptions options) {
    return {"catenoid", AmbientSpace::euclidean(3),
            box(vec2(0.0, -v_max), vec2(2 * kPi, v_max), {true, false}),
            [](const VectorXd& u) {
                const double ch = std::cosh(u(1));
                return vec3(ch * std::cos(u(0)), ch * std::sin(u(0)), u(1));
            },
            vec2(0.0, 0.0), options};
}

ImmersionChart helicoid(double v_max, double t_max, ChartOptions options) {
    return {"helicoid", AmbientSpace::euclidean(3),
            box(vec2(-t_max, -v_max), vec2(t_max, v_max), {false, false}),
            [](const VectorXd& u) {
                const double sh = std::sinh(u(1));
                return vec3(sh * std::cos(u(0)), sh * std::sin(u(0)), u(0));
            },
            vec2(0.0, 0.0), options};
}

ImmersionChart graph(std::string name, std::function<double(double, double)> height,
                     double half_width, ChartOptions options) {
    return {std::move(name), AmbientSpace::euclidean(3),
            box(vec2(-half_width, -half_width), vec2(half_width, half_width), {false, false}),
            [height = std::move(height)](const VectorXd& u) {
                return vec3(u(0), u(1), height(u(0), u(1)));
            },
            vec2(0.0, 0.0), options};
}

ImmersionChart hyperbolic_plane(double c, double half_width, ChartOptions options) {
    const AmbientSpace h3 = AmbientSpace::hyperbolic(3, c);
    return {"hyperbolic_plane", h3,
            box(vec2(-half_width, -half_width), vec2(half_width, half_width), {false, false}),
            [c](const VectorXd& u) {
                const double s = u.norm();
                const double k = sinhc(c * s); // sinh(c s) / (c s)
                VectorXd x(4);
                x << std::cosh(c * s) / c, k * u(0), k * u(1), 0.0;
                return x;
            },
            vec2(0.0, 0.0), options};
}

ImmersionChart round_sphere(int m, double radius, ChartOptions options) {
    if (m < 1) throw Error(ErrorCode::InvalidConfig, "round_sphere needs m >= 1");
    VectorXd lower = VectorXd::Constant(m, 0.1);
    VectorXd upper = VectorXd::Constant(m, kPi - 0.1);
    std::vector<bool> periodic(static_cast<std::size_t>(m), false);
    lower(m - 1) = 0.0;
    upper(m - 1) = 2 * kPi;
    periodic.back() = true;
    VectorXd base = VectorXd::Constant(m, kPi / 2);
    base(m - 1) = 0.0;
    return {"round_sphere", AmbientSpace::euclidean(m + 1),
            box(lower, upper, periodic),
            [m, radius](const VectorXd& t) {
                VectorXd x(m + 1);
                double prod = radius;
                for (int i = 0; i < m; ++i) {
                    x(i) = prod * std::cos(t(i));
                    prod *= std::sin(t(i));
                }
                x(m) = prod;
                return x;
            },
            base, options};
}

} // namespace tracegrowth::geometry::charts
