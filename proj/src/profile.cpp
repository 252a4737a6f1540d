#include "tracegrowth/profile.hpp"

#include "tracegrowth/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tracegrowth::comparison {

namespace {

constexpr double kOverflow = 1e250;

struct State {
    double h;
    double dh;
};

// Cubic Hermite on [t0, t1] from values and slopes at both ends.
double hermite(double t0, double t1, double y0, double y1, double s0, double s1, double t) {
    const double w = t1 - t0;
    const double x = (t - t0) / w;
    const double x2 = x * x;
    const double x3 = x2 * x;
    return (2 * x3 - 3 * x2 + 1) * y0 + (x3 - 2 * x2 + x) * w * s0 + (-2 * x3 + 3 * x2) * y1 +
           (x3 - x2) * w * s1;
}

template <class Pred>
double bisect_boundary(double good, double bad, Pred&& ok) {
    for (int it = 0; it < 200 && std::abs(bad - good) > 1e-15 * std::max(1.0, std::abs(good));
         ++it) {
        const double mid = 0.5 * (good + bad);
        if (ok(mid)) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    return 0.5 * (good + bad);
}

} // namespace

double ExtendedRadius::value() const {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
}

std::partial_ordering operator<=>(const ExtendedRadius& r, double t) {
    if (!r.finite_) return std::isnan(t) ? std::partial_ordering::unordered
                                         : std::partial_ordering::greater;
    return r.value_ <=> t;
}

std::string ExtendedRadius::describe() const {
    if (!finite_) return "unbounded";
    std::ostringstream os;
    os.precision(12);
    os << value_;
    return os.str();
}

CurvatureFunction CurvatureFunction::constant(double k) {
    CurvatureFunction f;
    f.t_ = {0.0};
    f.k_ = {k};
    return f;
}

CurvatureFunction CurvatureFunction::table(std::vector<double> t, std::vector<double> k) {
    if (t.empty() || t.size() != k.size()) {
        throw Error(ErrorCode::InvalidConfig, "curvature table needs matching non-empty columns");
    }
    if (t.front() != 0.0) throw Error(ErrorCode::InvalidConfig, "curvature table must start at t = 0");
    if (!std::is_sorted(t.begin(), t.end()) ||
        std::adjacent_find(t.begin(), t.end()) != t.end()) {
        throw Error(ErrorCode::InvalidConfig, "curvature table abscissae must be strictly increasing");
    }
    CurvatureFunction f;
    f.t_ = std::move(t);
    f.k_ = std::move(k);
    return f;
}

double CurvatureFunction::operator()(double t) const {
    t = std::abs(t);
    if (t_.size() == 1 || t <= t_.front()) return k_.front();
    if (t >= t_.back()) return k_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const auto i = static_cast<std::size_t>(it - t_.begin());
    const double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return (1.0 - w) * k_[i - 1] + w * k_[i];
}

std::optional<double> CurvatureFunction::constant_value() const {
    if (std::adjacent_find(k_.begin(), k_.end(), std::not_equal_to<>()) == k_.end()) {
        return k_.front();
    }
    return std::nullopt;
}

std::string CurvatureFunction::describe() const {
    std::ostringstream os;
    if (auto k = constant_value()) {
        os << "constant(" << *k << ")";
    } else {
        os << "table(" << t_.size() << " rows)";
    }
    return os.str();
}

AlphaFunction AlphaFunction::constant(double kappa) {
    if (kappa < 0.0) throw Error(ErrorCode::Domain, "alpha must be nonnegative");
    return kappa == 0.0 ? zero() : AlphaFunction(Kind::Constant, kappa);
}

AlphaFunction AlphaFunction::inverse_shifted(double eps) {
    if (!(eps > 0.0)) throw Error(ErrorCode::Domain, "inverse_shifted needs eps > 0");
    return {Kind::InverseShifted, eps};
}

AlphaFunction AlphaFunction::scaled(int m, double c) {
    if (m < 1 || c < 0.0) throw Error(ErrorCode::Domain, "scaled alpha needs m >= 1, c >= 0");
    return constant((m - 1) * c / m);
}

double AlphaFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return param_;
        case Kind::InverseShifted: return 1.0 / (t + param_);
    }
    return 0.0;
}

double AlphaFunction::derivative(double t) const {
    if (kind_ == Kind::InverseShifted) return -1.0 / ((t + param_) * (t + param_));
    return 0.0;
}

double AlphaFunction::integral(double a, double b) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return param_ * (b - a);
        case Kind::InverseShifted: return std::log((b + param_) / (a + param_));
    }
    return 0.0;
}

std::string AlphaFunction::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Zero: os << "zero"; break;
        case Kind::Constant: os << "constant(" << param_ << ")"; break;
        case Kind::InverseShifted: os << "inverse_shifted(" << param_ << ")"; break;
    }
    return os.str();
}

std::size_t ComparisonProfile::bracket(double t) const {
    if (!(t >= 0.0) || t > t_end()) {
        std::ostringstream os;
        os << "t = " << t << " outside the solved interval [0, " << t_end() << "]";
        throw Error(ErrorCode::ProfileDomain, os.str());
    }
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const auto i = static_cast<std::size_t>(it - t_.begin());
    return std::clamp<std::size_t>(i, 1, t_.size() - 1) - 1;
}

double ComparisonProfile::h(double t) const {
    const std::size_t i = bracket(t);
    return hermite(t_[i], t_[i + 1], h_[i], h_[i + 1], dh_[i], dh_[i + 1], t);
}

double ComparisonProfile::dh(double t) const {
    const std::size_t i = bracket(t);
    const double s0 = -curvature_(t_[i]) * h_[i];
    const double s1 = -curvature_(t_[i + 1]) * h_[i + 1];
    return hermite(t_[i], t_[i + 1], dh_[i], dh_[i + 1], s0, s1, t);
}

bool ComparisonProfile::in_domain(double t) const { return t >= 0.0 && t <= t_end() && r0_ > t; }

double ComparisonProfile::log_derivative_gap(double t) const { return dh(t) / h(t) - alpha_(t); }

bool ComparisonProfile::admissible(double t) const {
    const double hv = h(t);
    if (!(hv > 0.0)) return false;
    const double q = dh(t) / hv;
    const double k = curvature_(t);
    if (!(q > alpha_(t))) return false;
    // Relative slack keeps the equality limit (e.g. coth -> 1) from flipping on rounding.
    const double slack = 1e-12 * (1.0 + q * q + std::abs(k));
    return alpha_.derivative(t) >= -q * q - k - slack;
}

ComparisonProfile solve_profile(const CurvatureFunction& curvature, const AlphaFunction& alpha,
                                double t_max, double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::Domain, "profile step must be positive");
    if (!(t_max > 0.0)) throw Error(ErrorCode::Domain, "profile t_max must be positive");

    ComparisonProfile p(curvature, alpha);
    p.step_ = step;
    p.t_.push_back(0.0);
    p.h_.push_back(0.0);
    p.dh_.push_back(1.0);

    auto rhs = [&](double t, State s) { return State{s.dh, -curvature(t) * s.h}; };

    State y{0.0, 1.0};
    double t = 0.0;
    while (t < t_max) {
        const double dt = std::min(step, t_max - t);
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * dt, {y.h + 0.5 * dt * k1.h, y.dh + 0.5 * dt * k1.dh});
        const State k3 = rhs(t + 0.5 * dt, {y.h + 0.5 * dt * k2.h, y.dh + 0.5 * dt * k2.dh});
        const State k4 = rhs(t + dt, {y.h + dt * k3.h, y.dh + dt * k3.dh});
        y.h += dt / 6.0 * (k1.h + 2 * k2.h + 2 * k3.h + k4.h);
        y.dh += dt / 6.0 * (k1.dh + 2 * k2.dh + 2 * k3.dh + k4.dh);
        // Landing within rounding of t_max counts as reaching it.
        t = (t_max - (t + dt) < 1e-12 * step) ? t_max : t + dt;
        if (!std::isfinite(y.h) || !std::isfinite(y.dh) || std::abs(y.h) > kOverflow ||
            std::abs(y.dh) > kOverflow) {
            p.truncated_ = true;
            break;
        }
        p.t_.push_back(t);
        p.h_.push_back(y.h);
        p.dh_.push_back(y.dh);
    }
    if (p.t_.size() < 2) throw Error(ErrorCode::Domain, "profile overflowed within the first step");

    // First positive zero of h.
    std::size_t limit = p.t_.size() - 1;
    for (std::size_t i = 1; i < p.t_.size(); ++i) {
        if (p.h_[i] <= 0.0) {
            const double lo = p.t_[i - 1];
            const double hi = p.t_[i];
            const double zero =
                p.h_[i] == 0.0 ? hi : bisect_boundary(lo, hi, [&](double s) { return p.h(s) > 0.0; });
            p.r0_ = ExtendedRadius::finite(zero);
            limit = i;
            break;
        }
    }

    // mu_bound: first grid failure of the admissibility pair, refined by bisection.
    p.mu_bound_ = p.r0_;
    double last_good = 0.0;
    bool failed = false;
    for (std::size_t i = 1; i <= limit; ++i) {
        const double ti = p.t_[i];
        if (p.r0_.is_finite() && ti >= p.r0_.value()) break;
        if (!p.admissible(ti)) {
            const double good = last_good > 0.0 ? last_good : 1e-3 * ti;
            p.mu_bound_ = ExtendedRadius::finite(
                bisect_boundary(good, ti, [&](double s) { return p.admissible(s); }));
            failed = true;
            break;
        }
        last_good = ti;
    }
    if (!failed && p.r0_.is_finite()) {
        // h'/h -> -inf at r0, so the pair fails somewhere in (last_good, r0].
        const double good = last_good > 0.0 ? last_good : 1e-3 * p.r0_.value();
        p.mu_bound_ = ExtendedRadius::finite(
            bisect_boundary(good, p.r0_.value(), [&](double s) { return p.admissible(s); }));
    }
    return p;
}

} // namespace tracegrowth::comparison
