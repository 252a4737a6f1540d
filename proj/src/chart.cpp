#include "tracegrowth/chart.hpp"

#include "tracegrowth/error.hpp"
#include "tracegrowth/profile.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace tracegrowth::geometry {

namespace {

std::string point_string(const Eigen::VectorXd& u) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
    os << ")";
    return os.str();
}

Eigen::VectorXd offset(const Eigen::VectorXd& u, int axis, double h) {
    Eigen::VectorXd v = u;
    v(axis) += h;
    return v;
}

Eigen::VectorXd offset2(const Eigen::VectorXd& u, int a, double ha, int b, double hb) {
    Eigen::VectorXd v = u;
    v(a) += ha;
    v(b) += hb;
    return v;
}

struct Derivatives {
    Eigen::MatrixXd first;               // coord_dim x m
    std::vector<Eigen::MatrixXd> second; // second[a * m + b] is a column vector d_a d_b f
};

// Central differences at a fixed step vector.
Derivatives differentiate(const ImmersionChart& chart, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& h, const Eigen::VectorXd& center, bool second) {
    const int m = chart.dim();
    const auto n = center.size();
    Derivatives d;
    d.first.resize(n, m);
    std::vector<Eigen::VectorXd> plus(m), minus(m);
    for (int a = 0; a < m; ++a) {
        plus[a] = chart(offset(u, a, h(a)));
        minus[a] = chart(offset(u, a, -h(a)));
        d.first.col(a) = (plus[a] - minus[a]) / (2.0 * h(a));
    }
    if (!second) return d;
    d.second.assign(static_cast<std::size_t>(m * m), Eigen::VectorXd::Zero(n));
    for (int a = 0; a < m; ++a) {
        d.second[a * m + a] = (plus[a] - 2.0 * center + minus[a]) / (h(a) * h(a));
        for (int b = a + 1; b < m; ++b) {
            const Eigen::VectorXd pp = chart(offset2(u, a, h(a), b, h(b)));
            const Eigen::VectorXd pm = chart(offset2(u, a, h(a), b, -h(b)));
            const Eigen::VectorXd mp = chart(offset2(u, a, -h(a), b, h(b)));
            const Eigen::VectorXd mm = chart(offset2(u, a, -h(a), b, -h(b)));
            d.second[a * m + b] = (pp - pm - mp + mm) / (4.0 * h(a) * h(b));
            d.second[b * m + a] = d.second[a * m + b];
        }
    }
    return d;
}

Derivatives derivatives(const ImmersionChart& chart, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& center, bool second) {
    const Eigen::VectorXd h = chart.step_sizes(u);
    Derivatives coarse = differentiate(chart, u, h, center, second);
    if (!chart.options().richardson) return coarse;
    const Derivatives fine = differentiate(chart, u, 0.5 * h, center, second);
    coarse.first = (4.0 * fine.first - coarse.first) / 3.0;
    for (std::size_t i = 0; i < coarse.second.size(); ++i) {
        coarse.second[i] = (4.0 * fine.second[i] - coarse.second[i]) / 3.0;
    }
    return coarse;
}

} // namespace

Eigen::VectorXd ParamDomain::wrap(const Eigen::VectorXd& u) const {
    Eigen::VectorXd w = u;
    for (int i = 0; i < dim(); ++i) {
        if (!periodic[static_cast<std::size_t>(i)]) continue;
        const double p = period(i);
        w(i) = lower(i) + std::fmod(std::fmod(u(i) - lower(i), p) + p, p);
    }
    return w;
}

bool ParamDomain::contains(const Eigen::VectorXd& u, double margin) const {
    if (u.size() != lower.size()) return false;
    for (int i = 0; i < dim(); ++i) {
        if (periodic[static_cast<std::size_t>(i)]) continue;
        if (u(i) < lower(i) + margin || u(i) > upper(i) - margin) return false;
    }
    return true;
}

ImmersionChart::ImmersionChart(std::string name, AmbientSpace ambient, ParamDomain domain,
                               ChartMap map, Eigen::VectorXd base_point, ChartOptions options)
    : name_(std::move(name)),
      ambient_(ambient),
      domain_(std::move(domain)),
      map_(std::move(map)),
      base_point_(std::move(base_point)),
      options_(options) {
    const int m = domain_.dim();
    if (m < 1 || domain_.upper.size() != m || static_cast<int>(domain_.periodic.size()) != m) {
        throw Error(ErrorCode::InvalidConfig, "chart '" + name_ + "': inconsistent parameter domain");
    }
    if (m >= ambient_.dim()) {
        throw Error(ErrorCode::InvalidConfig, "chart '" + name_ + "': dimension must be below the ambient dimension");
    }
    if (base_point_.size() != m) {
        throw Error(ErrorCode::InvalidConfig, "chart '" + name_ + "': base point has wrong dimension");
    }
    if (!(options_.fd_step > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "chart '" + name_ + "': fd_step must be positive");
    }
    if (options_.orientation != 1 && options_.orientation != -1) {
        throw Error(ErrorCode::InvalidConfig, "chart '" + name_ + "': orientation must be +1 or -1");
    }
    base_image_ = (*this)(base_point_);
    if (base_image_.size() != ambient_.coord_dim()) {
        throw Error(ErrorCode::InvalidConfig, "chart '" + name_ + "': map returns " +
                                                  std::to_string(base_image_.size()) +
                                                  " coordinates, ambient needs " +
                                                  std::to_string(ambient_.coord_dim()));
    }
    if (ambient_.membership_residual(base_image_) > 1e-9) {
        throw Error(ErrorCode::InvalidConfig, "chart '" + name_ + "': map leaves the hyperboloid");
    }
}

Eigen::VectorXd ImmersionChart::operator()(const Eigen::VectorXd& u) const {
    return map_(domain_.wrap(u));
}

Eigen::VectorXd ImmersionChart::step_sizes(const Eigen::VectorXd& u) const {
    return options_.fd_step * (Eigen::VectorXd::Ones(u.size()) + u.cwiseAbs());
}

ImmersionChart ImmersionChart::with_options(ChartOptions options) const {
    return {name_, ambient_, domain_, map_, base_point_, options};
}

ImmersionChart ImmersionChart::with_base_point(const Eigen::VectorXd& base) const {
    return {name_, ambient_, domain_, map_, base, options_};
}

Eigen::MatrixXd ImmersionChart::jacobian(const Eigen::VectorXd& u) const {
    return derivatives(*this, u, (*this)(u), false).first;
}

Eigen::VectorXd FrameData::tangent_components(const AmbientSpace& ambient,
                                              const Eigen::VectorXd& v) const {
    Eigen::VectorXd pairings(dim());
    for (int b = 0; b < dim(); ++b) pairings(b) = ambient.inner(v, tangents.col(b));
    return inverse_metric * pairings;
}

Eigen::VectorXd FrameData::normal_part(const AmbientSpace& ambient, const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
    for (int alpha = 0; alpha < codim(); ++alpha) {
        out += ambient.inner(v, normals.col(alpha)) * normals.col(alpha);
    }
    return out;
}

double FrameData::tangent_norm(const Eigen::VectorXd& components) const {
    return std::sqrt(std::max(0.0, components.dot(metric * components)));
}

Eigen::MatrixXd FrameData::orthonormal_frame() const {
    // E = T L^{-T}  <=>  E^T = L^{-1} T^T.
    const Eigen::MatrixXd lt = cholesky.triangularView<Eigen::Lower>().solve(tangents.transpose());
    return lt.transpose();
}

symop::SymOp FrameData::to_orthonormal(const Eigen::MatrixXd& mixed) const {
    // S = L^T M L^{-T} = L^{-1} (g M) L^{-T}.
    const auto low = cholesky.triangularView<Eigen::Lower>();
    const Eigen::MatrixXd gm = metric * mixed;
    const Eigen::MatrixXd left = low.solve(gm);
    const Eigen::MatrixXd s = low.solve(left.transpose()).transpose();
    return symop::SymOp(s);
}

Eigen::MatrixXd FrameData::from_orthonormal(const symop::SymOp& op) const {
    // M = L^{-T} S L^T.
    const auto up = cholesky.transpose().triangularView<Eigen::Upper>();
    return up.solve(Eigen::MatrixXd(op.matrix() * cholesky.transpose()));
}

FrameData frame_at(const ImmersionChart& chart, const Eigen::VectorXd& u) {
    const AmbientSpace& amb = chart.ambient();
    const int m = chart.dim();
    FrameData f;
    f.u = u;
    f.point = chart(u);
    const Derivatives d = derivatives(chart, u, f.point, true);
    f.tangents = d.first;
    if (amb.is_hyperbolic()) {
        for (int a = 0; a < m; ++a) f.tangents.col(a) = amb.project_to_tangent(f.point, f.tangents.col(a));
    }

    f.metric.resize(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
            f.metric(a, b) = f.metric(b, a) = amb.inner(f.tangents.col(a), f.tangents.col(b));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f.metric, Eigen::EigenvaluesOnly);
    const double smallest_sv = std::sqrt(std::max(0.0, eig.eigenvalues()(0)));
    if (!(smallest_sv > 1e-6)) {
        throw Error(ErrorCode::DegenerateChart, "chart '" + chart.name() + "' loses rank at u = " +
                                                    point_string(u));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(f.metric);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::DegenerateChart, "induced metric not SPD at u = " + point_string(u));
    }
    f.cholesky = llt.matrixL();
    f.inverse_metric = llt.solve(Eigen::MatrixXd::Identity(m, m));

    // Christoffel symbols of the induced metric: Gamma^k_ab = g^kc <d_a d_b f, d_c f>.
    f.christoffel.assign(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(m, m));
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            Eigen::VectorXd pair(m);
            for (int c = 0; c < m; ++c) pair(c) = amb.inner(d.second[a * m + b], f.tangents.col(c));
            const Eigen::VectorXd gamma = f.inverse_metric * pair;
            for (int k = 0; k < m; ++k) f.christoffel[static_cast<std::size_t>(k)](a, b) = gamma(k);
        }
    }

    // Normal frame: pivoted Gram-Schmidt over the ambient coordinate directions.
    const int codim = chart.codim();
    const auto n = f.point.size();
    std::vector<Eigen::VectorXd> candidates;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
        e = amb.project_to_tangent(f.point, e);
        e -= f.to_ambient(f.tangent_components(amb, e));
        candidates.push_back(e);
    }
    f.normals.resize(n, codim);
    for (int alpha = 0; alpha < codim; ++alpha) {
        double best = -1.0;
        std::size_t pick = 0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const double nv = amb.inner(candidates[i], candidates[i]);
            if (nv > best) {
                best = nv;
                pick = i;
            }
        }
        if (!(best > 1e-12)) {
            throw Error(ErrorCode::DegenerateChart, "normal frame collapsed at u = " + point_string(u));
        }
        const Eigen::VectorXd nu = candidates[pick] / std::sqrt(best);
        f.normals.col(alpha) = nu;
        for (auto& cand : candidates) cand -= amb.inner(cand, nu) * nu;
    }
    if (codim == 1) {
        Eigen::MatrixXd basis(n, n);
        int col = 0;
        if (amb.is_hyperbolic()) basis.col(col++) = f.point;
        for (int a = 0; a < m; ++a) basis.col(col++) = f.tangents.col(a);
        basis.col(col) = f.normals.col(0);
        const double sign = basis.determinant() >= 0.0 ? 1.0 : -1.0;
        f.normals.col(0) *= sign * chart.options().orientation;
    }

    f.second_form.assign(static_cast<std::size_t>(codim), Eigen::MatrixXd::Zero(m, m));
    f.mean_curvature = Eigen::VectorXd::Zero(codim);
    for (int alpha = 0; alpha < codim; ++alpha) {
        Eigen::MatrixXd& ii = f.second_form[static_cast<std::size_t>(alpha)];
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) ii(a, b) = amb.inner(d.second[a * m + b], f.normals.col(alpha));
        }
        f.mean_curvature(alpha) = (f.inverse_metric.cwiseProduct(ii)).sum();
    }
    if (codim == 1) {
        f.shape_mixed = f.inverse_metric * f.second_form[0];
        f.shape = f.to_orthonormal(*f.shape_mixed);
    }
    return f;
}

RadialData ambient_radial(const ImmersionChart& chart, const FrameData& frame) {
    const AmbientSpace& amb = chart.ambient();
    RadialData out;
    out.r = amb.distance(frame.point, chart.base_image());
    if (!(out.r > 1e-12 * (1.0 + chart.base_image().norm()))) {
        throw Error(ErrorCode::SingularRadialField,
                    "radial field undefined at the base point, u = " + point_string(frame.u));
    }
    out.grad_ambient = amb.distance_gradient(frame.point, chart.base_image());
    out.grad_tangent_coords = frame.tangent_components(amb, out.grad_ambient);
    out.grad_tangent = frame.to_ambient(out.grad_tangent_coords);
    out.grad_normal = out.grad_ambient - out.grad_tangent;
    out.tangent_norm = frame.tangent_norm(out.grad_tangent_coords);
    return out;
}

RadialData ambient_radial(const ImmersionChart& chart, const Eigen::VectorXd& u) {
    return ambient_radial(chart, frame_at(chart, u));
}

double ambient_distance(const ImmersionChart& chart, const Eigen::VectorXd& u) {
    return chart.ambient().distance(chart(u), chart.base_image());
}

Eigen::VectorXd radial_vector_field(const ImmersionChart& chart, const Eigen::VectorXd& u,
                                    const comparison::ComparisonProfile& profile) {
    const Eigen::VectorXd x = chart(u);
    const AmbientSpace& amb = chart.ambient();
    const double r = amb.distance(x, chart.base_image());
    if (!(r > 0.0)) {
        throw Error(ErrorCode::SingularRadialField, "radial field at the base point");
    }
    if (!profile.in_domain(r)) {
        throw Error(ErrorCode::ProfileDomain, "r = " + std::to_string(r) +
                                                  " outside the profile domain (r0 = " +
                                                  profile.r0().describe() + ")");
    }
    return profile.h(r) * amb.distance_gradient(x, chart.base_image());
}

ChartVectorField radial_field(const ImmersionChart& chart,
                              const comparison::ComparisonProfile& profile) {
    auto shared = std::make_shared<const comparison::ComparisonProfile>(profile);
    return [chart, shared](const Eigen::VectorXd& u) { return radial_vector_field(chart, u, *shared); };
}

ChartVectorField position_field(const ImmersionChart& chart) {
    return [chart](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        const Eigen::VectorXd x = chart(u);
        const AmbientSpace& amb = chart.ambient();
        const double r = amb.distance(x, chart.base_image());
        if (r == 0.0) return Eigen::VectorXd::Zero(x.size());
        return r * amb.distance_gradient(x, chart.base_image());
    };
}

} // namespace tracegrowth::geometry
