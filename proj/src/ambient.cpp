#include "tracegrowth/ambient.hpp"

#include "tracegrowth/error.hpp"

#include <cmath>
#include <sstream>

namespace tracegrowth::geometry {

AmbientSpace AmbientSpace::euclidean(int n) {
    if (n < 2) throw Error(ErrorCode::Domain, "ambient dimension must be >= 2");
    return {Kind::Euclidean, n, 0.0};
}

AmbientSpace AmbientSpace::hyperbolic(int n, double c) {
    if (n < 2) throw Error(ErrorCode::Domain, "ambient dimension must be >= 2");
    if (!(c > 0.0)) throw Error(ErrorCode::Domain, "hyperbolic curvature scale c must be > 0");
    return {Kind::Hyperbolic, n, c};
}

double AmbientSpace::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    const double dot = a.dot(b);
    return is_hyperbolic() ? dot - 2.0 * a(0) * b(0) : dot;
}

double AmbientSpace::norm(const Eigen::VectorXd& v) const {
    return std::sqrt(std::max(0.0, inner(v, v)));
}

Eigen::VectorXd AmbientSpace::project_to_tangent(const Eigen::VectorXd& x,
                                                 const Eigen::VectorXd& v) const {
    if (!is_hyperbolic()) return v;
    return v + (c_ * c_ * inner(v, x)) * x;
}

double AmbientSpace::distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    const Eigen::VectorXd d = x - y;
    if (!is_hyperbolic()) return d.norm();
    // cosh(c r) = 1 + c^2 |x - y|_L^2 / 2, i.e. sinh(c r / 2) = c |x - y|_L / 2.
    // The chord form avoids the cancellation in arccosh near r = 0.
    const double chord = std::sqrt(std::max(0.0, inner(d, d)));
    return 2.0 / c_ * std::asinh(0.5 * c_ * chord);
}

Eigen::VectorXd AmbientSpace::distance_gradient(const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& origin) const {
    const Eigen::VectorXd d = x - origin;
    if (!is_hyperbolic()) return d / d.norm();
    const double r = distance(x, origin);
    const double z_minus_one = 0.5 * c_ * c_ * inner(d, d);
    // grad r = c (z x - q0) / sinh(c r) with z = cosh(c r) = -c^2 <x, q0>_L.
    return (c_ / std::sinh(c_ * r)) * (d + z_minus_one * x);
}

double AmbientSpace::membership_residual(const Eigen::VectorXd& x) const {
    if (!is_hyperbolic()) return 0.0;
    return std::abs(inner(x, x) + 1.0 / (c_ * c_)) * c_ * c_;
}

std::string AmbientSpace::describe() const {
    std::ostringstream os;
    if (is_hyperbolic()) {
        os << "H^" << n_ << "(-" << c_ * c_ << ")";
    } else {
        os << "R^" << n_;
    }
    return os.str();
}

} // namespace tracegrowth::geometry
