#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace tracegrowth::comparison {

/// A radius that is either finite or unbounded (beyond every finite value).
/// All comparisons against doubles are total.
class ExtendedRadius {
public:
    static ExtendedRadius finite(double value) { return ExtendedRadius(value, true); }
    static ExtendedRadius unbounded() { return ExtendedRadius(0.0, false); }

    bool is_finite() const { return finite_; }
    /// The value, or +inf when unbounded.
    double value() const;

    friend std::partial_ordering operator<=>(const ExtendedRadius& r, double t);
    friend bool operator==(const ExtendedRadius& r, double t) { return r.finite_ && r.value_ == t; }
    friend bool operator==(const ExtendedRadius& a, const ExtendedRadius& b) = default;

    std::string describe() const;

private:
    ExtendedRadius(double value, bool finite) : value_(value), finite_(finite) {}

    double value_;
    bool finite_;
};

/// Even, continuous radial curvature bound t -> K(t).
class CurvatureFunction {
public:
    static CurvatureFunction constant(double k);
    static CurvatureFunction flat() { return constant(0.0); }
    static CurvatureFunction hyperbolic(double c) { return constant(-c * c); }
    static CurvatureFunction spherical(double c) { return constant(c * c); }
    /// Piecewise-linear table on t >= 0 (ascending), extended evenly to t < 0
    /// and by the last value beyond the table.
    static CurvatureFunction table(std::vector<double> t, std::vector<double> k);

    double operator()(double t) const;
    std::optional<double> constant_value() const;
    std::string describe() const;

private:
    CurvatureFunction() = default;

    std::vector<double> t_;
    std::vector<double> k_;
};

/// Nonnegative C^1 weight alpha(t) with derivative and closed-form integral.
class AlphaFunction {
public:
    enum class Kind { Zero, Constant, InverseShifted };

    static AlphaFunction zero() { return AlphaFunction(Kind::Zero, 0.0); }
    static AlphaFunction constant(double kappa);
    /// alpha(t) = 1 / (t + eps).
    static AlphaFunction inverse_shifted(double eps);
    /// alpha = (m - 1) c / m.
    static AlphaFunction scaled(int m, double c);

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }

    double operator()(double t) const;
    double derivative(double t) const;
    /// int_a^b alpha(s) ds.
    double integral(double a, double b) const;
    std::string describe() const;

private:
    AlphaFunction(Kind kind, double param) : kind_(kind), param_(param) {}

    Kind kind_;
    double param_;
};

/// Solution h of h'' + K h = 0, h(0) = 0, h'(0) = 1 on [0, t_end], with the
/// first positive zero r0 and the validity radius mu_bound of the pair (K, alpha).
class ComparisonProfile {
public:
    const CurvatureFunction& curvature() const { return curvature_; }
    const AlphaFunction& alpha() const { return alpha_; }

    double h(double t) const;
    double dh(double t) const;

    /// Right end of the solved table: t_max, or the overflow point if truncated.
    double t_end() const { return t_.back(); }
    bool truncated() const { return truncated_; }
    double step() const { return step_; }

    ExtendedRadius r0() const { return r0_; }
    ExtendedRadius mu_bound() const { return mu_bound_; }

    /// True for 0 <= t <= t_end with t < r0.
    bool in_domain(double t) const;

    /// h'(t)/h(t) - alpha(t).
    double log_derivative_gap(double t) const;

    const std::vector<double>& grid() const { return t_; }
    const std::vector<double>& grid_h() const { return h_; }
    const std::vector<double>& grid_dh() const { return dh_; }

private:
    friend ComparisonProfile solve_profile(const CurvatureFunction&, const AlphaFunction&, double,
                                           double);

    ComparisonProfile(CurvatureFunction k, AlphaFunction a)
        : curvature_(std::move(k)), alpha_(a) {}

    std::size_t bracket(double t) const;
    bool admissible(double t) const;

    CurvatureFunction curvature_;
    AlphaFunction alpha_;
    std::vector<double> t_, h_, dh_;
    double step_ = 0.0;
    bool truncated_ = false;
    ExtendedRadius r0_ = ExtendedRadius::unbounded();
    ExtendedRadius mu_bound_ = ExtendedRadius::unbounded();
};

/// Fixed-step RK4 with cubic Hermite dense output. r0 by bisection on the
/// first sign change; mu_bound is the supremum of t such that on all of
/// (0, t] both h'/h > alpha and alpha' >= -(h'/h)^2 - K hold.
ComparisonProfile solve_profile(const CurvatureFunction& curvature, const AlphaFunction& alpha,
                                double t_max, double step);

} // namespace tracegrowth::comparison
