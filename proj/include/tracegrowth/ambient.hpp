#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>

namespace tracegrowth::geometry {

/// Model ambient space. Points and tangent vectors are stored in ambient
/// coordinates: R^n for Euclidean(n), R^{n,1} (hyperboloid model, time-like
/// coordinate first, <x,x>_L = -1/c^2, x_0 > 0) for Hyperbolic(n, c).
class AmbientSpace {
public:
    enum class Kind { Euclidean, Hyperbolic };

    static AmbientSpace euclidean(int n);
    static AmbientSpace hyperbolic(int n, double c);

    Kind kind() const { return kind_; }
    bool is_hyperbolic() const { return kind_ == Kind::Hyperbolic; }
    int dim() const { return n_; }
    /// Length of a coordinate vector: n for Euclidean, n + 1 for Hyperbolic.
    int coord_dim() const { return is_hyperbolic() ? n_ + 1 : n_; }
    double c() const { return c_; }

    /// Constant radial curvature: 0 or -c^2.
    double curvature() const { return is_hyperbolic() ? -c_ * c_ : 0.0; }
    double injectivity_radius() const { return std::numeric_limits<double>::infinity(); }

    /// Euclidean dot product or Minkowski pairing -a_0 b_0 + sum a_i b_i.
    double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
    double norm(const Eigen::VectorXd& v) const;

    /// Orthogonal projection of a coordinate vector onto T_x of the ambient.
    /// Identity for Euclidean.
    Eigen::VectorXd project_to_tangent(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;

    /// Geodesic distance between two points.
    double distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

    /// Unit gradient at x of r = d(., origin). Undefined when x == origin.
    Eigen::VectorXd distance_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& origin) const;

    /// Largest deviation of x from the model (0 for Euclidean).
    double membership_residual(const Eigen::VectorXd& x) const;

    std::string describe() const;

private:
    AmbientSpace(Kind kind, int n, double c) : kind_(kind), n_(n), c_(c) {}

    Kind kind_;
    int n_;
    double c_;
};

} // namespace tracegrowth::geometry
