#include "tracegrowth/fields.hpp"

#include "tracegrowth/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tracegrowth::fields {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string where(const VectorXd& u) {
    std::ostringstream os;
    os << "u = (";
    for (Eigen::Index i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
    os << ")";
    return os.str();
}

double axis_step(double base, const VectorXd& u, int a) { return base * (1.0 + std::abs(u(a))); }

VectorXd shifted(const VectorXd& u, int a, double h) {
    VectorXd v = u;
    v(a) += h;
    return v;
}

// Coordinate tangent vectors, projected onto the ambient tangent space.
MatrixXd tangent_basis(const ImmersionChart& chart, const VectorXd& u) {
    MatrixXd j = chart.jacobian(u);
    const auto& amb = chart.ambient();
    if (amb.is_hyperbolic()) {
        const VectorXd x = chart(u);
        for (Eigen::Index a = 0; a < j.cols(); ++a) j.col(a) = amb.project_to_tangent(x, j.col(a));
    }
    return j;
}

MatrixXd gram(const geometry::AmbientSpace& amb, const MatrixXd& t) {
    MatrixXd g(t.cols(), t.cols());
    for (Eigen::Index a = 0; a < t.cols(); ++a) {
        for (Eigen::Index b = a; b < t.cols(); ++b) g(a, b) = g(b, a) = amb.inner(t.col(a), t.col(b));
    }
    return g;
}

// D_Phi X given the frame and the mixed components at the center point.
double phi_divergence_at(const ImmersionChart& chart, const FrameData& frame, const MatrixXd& mixed,
                         const geometry::ChartVectorField& x, double step) {
    const int m = frame.dim();
    const auto& amb = chart.ambient();
    MatrixXd grad(m, m); // grad(c, a) = g^{cd} <d_a X, d_d f>
    for (int a = 0; a < m; ++a) {
        const double h = axis_step(step, frame.u, a);
        // five-point stencil; hyperboloid components grow like e^{2r} and the
        // Lorentz pairing cancels most of it, so h^2 truncation is not enough
        const VectorXd dx = (8.0 * (x(shifted(frame.u, a, h)) - x(shifted(frame.u, a, -h))) -
                             (x(shifted(frame.u, a, 2.0 * h)) - x(shifted(frame.u, a, -2.0 * h)))) /
                            (12.0 * h);
        VectorXd pair(m);
        for (int d = 0; d < m; ++d) pair(d) = amb.inner(dx, frame.tangents.col(d));
        grad.col(a) = frame.inverse_metric * pair;
    }
    return (mixed.array() * grad.transpose().array()).sum();
}

std::vector<MatrixXd> zero_partials(int m) { return std::vector<MatrixXd>(static_cast<std::size_t>(m), MatrixXd::Zero(m, m)); }

// Flow of a coordinate vector field for parameter time s (fixed-step RK4).
VectorXd flow(const CoordVectorField& v, VectorXd u, double s) {
    if (s == 0.0) return u;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(s) / 1e-3)));
    const double dt = s / steps;
    for (int i = 0; i < steps; ++i) {
        const VectorXd k1 = v(u);
        const VectorXd k2 = v(u + 0.5 * dt * k1);
        const VectorXd k3 = v(u + 0.5 * dt * k2);
        const VectorXd k4 = v(u + dt * k3);
        u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return u;
}

} // namespace

ScalarField::ScalarField(Value value, std::optional<Partials> partials, double fd_step)
    : value_(std::move(value)), partials_(std::move(partials)), fd_step_(fd_step) {}

ScalarField ScalarField::constant(double v) {
    return ScalarField([v](const VectorXd&) { return v; },
                       Partials([](const VectorXd& u) { return VectorXd::Zero(u.size()).eval(); }));
}

ScalarField ScalarField::radial(const ImmersionChart& chart, std::function<double(double)> fn,
                                std::function<double(double)> dfn) {
    auto value = [chart, fn](const VectorXd& u) { return fn(geometry::ambient_distance(chart, u)); };
    auto partials = [chart, dfn](const VectorXd& u) -> VectorXd {
        const VectorXd x = chart(u);
        const auto& amb = chart.ambient();
        const double r = amb.distance(x, chart.base_image());
        if (r == 0.0) return VectorXd::Zero(u.size());
        const VectorXd grad = amb.distance_gradient(x, chart.base_image());
        const MatrixXd t = tangent_basis(chart, u);
        VectorXd out(u.size());
        for (Eigen::Index a = 0; a < u.size(); ++a) out(a) = dfn(r) * amb.inner(grad, t.col(a));
        return out;
    };
    return ScalarField(value, Partials(partials), chart.fd_step());
}

VectorXd ScalarField::partials(const VectorXd& u) const {
    if (partials_) return (*partials_)(u);
    VectorXd out(u.size());
    for (Eigen::Index a = 0; a < u.size(); ++a) {
        const double h = axis_step(fd_step_, u, static_cast<int>(a));
        out(a) = (value_(shifted(u, static_cast<int>(a), h)) - value_(shifted(u, static_cast<int>(a), -h))) /
                 (2.0 * h);
    }
    return out;
}

OperatorField::OperatorField(std::string name, ImmersionChart chart, Eval eval,
                             std::optional<Derivative> derivative, bool positivity_required,
                             double diff_step)
    : name_(std::move(name)),
      chart_(std::move(chart)),
      eval_(std::move(eval)),
      derivative_(std::move(derivative)),
      positivity_required_(positivity_required),
      diff_step_(diff_step) {
    if (!(diff_step_ > 0.0)) throw Error(ErrorCode::InvalidConfig, "field diff_step must be positive");
}

OperatorField OperatorField::identity(const ImmersionChart& chart) {
    const int m = chart.dim();
    return {"identity", chart, [m](const FrameData&) { return MatrixXd::Identity(m, m).eval(); },
            Derivative([m](const FrameData&) { return zero_partials(m); }), true};
}

OperatorField OperatorField::lambda_identity(const ImmersionChart& chart, ScalarField lambda, double s) {
    const int m = chart.dim();
    auto power = [s](double l) {
        if (s == 1.0) return l;
        if (l < 0.0 && s != std::round(s)) {
            throw Error(ErrorCode::Domain, "lambda^s with lambda < 0 and fractional s");
        }
        return std::pow(l, s);
    };
    auto eval = [m, lambda, power](const FrameData& f) {
        return (power(lambda(f.u)) * MatrixXd::Identity(m, m)).eval();
    };
    auto derivative = [m, lambda, s](const FrameData& f) {
        const double l = lambda(f.u);
        const double factor = s == 1.0 ? 1.0 : s * std::pow(l, s - 1.0);
        const VectorXd d = lambda.partials(f.u);
        std::vector<MatrixXd> out;
        for (int a = 0; a < m; ++a) out.push_back(factor * d(a) * MatrixXd::Identity(m, m));
        return out;
    };
    OperatorField field("lambda_identity", chart, eval, Derivative(derivative), false);
    field.lambda_ = lambda;
    field.exponent_ = s;
    return field;
}

OperatorField OperatorField::shape_operator(const ImmersionChart& chart) {
    if (chart.codim() != 1) throw Error(ErrorCode::Unsupported, "shape operator needs codimension 1");
    return {"shape_operator", chart, [](const FrameData& f) { return *f.shape_mixed; }};
}

OperatorField OperatorField::newton(const ImmersionChart& chart, int j) {
    if (chart.codim() != 1) throw Error(ErrorCode::Unsupported, "Newton operators need codimension 1");
    if (j < 0 || j > chart.dim()) throw Error(ErrorCode::Domain, "Newton index out of range");
    return {"newton(" + std::to_string(j) + ")", chart, [j](const FrameData& f) {
                return f.from_orthonormal(symop::newton_operator(*f.shape, j));
            }};
}

OperatorField OperatorField::distribution(const ImmersionChart& chart, std::vector<CoordVectorField> spanning) {
    const int m = chart.dim();
    const int k = static_cast<int>(spanning.size());
    if (k < 1 || k > m) throw Error(ErrorCode::InvalidConfig, "distribution needs 1..m spanning fields");
    auto eval = [m, k, spanning](const FrameData& f) {
        MatrixXd v(m, k);
        for (int l = 0; l < k; ++l) v.col(l) = spanning[static_cast<std::size_t>(l)](f.u);
        const MatrixXd gv = f.metric * v;
        const MatrixXd small = v.transpose() * gv;
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(small, Eigen::EigenvaluesOnly);
        if (!(eig.eigenvalues()(0) > 1e-10 * std::max(1.0, eig.eigenvalues()(k - 1)))) {
            throw Error(ErrorCode::DegenerateDistribution, "spanning fields dependent at " + where(f.u));
        }
        return (v * small.ldlt().solve(gv.transpose())).eval();
    };
    OperatorField field("distribution", chart, eval, std::nullopt, true);
    field.spanning_ = std::move(spanning);
    return field;
}

OperatorField OperatorField::with_positivity(bool required) const {
    OperatorField out = *this;
    out.positivity_required_ = required;
    return out;
}

MatrixXd OperatorField::mixed(const VectorXd& u) const {
    return eval_(geometry::frame_at(chart_, u));
}

std::vector<MatrixXd> OperatorField::partials(const FrameData& frame) const {
    if (derivative_) return (*derivative_)(frame);
    std::vector<MatrixXd> out;
    for (int a = 0; a < frame.dim(); ++a) {
        const double h = axis_step(diff_step_, frame.u, a);
        const MatrixXd plus = mixed(shifted(frame.u, a, h));
        const MatrixXd minus = mixed(shifted(frame.u, a, -h));
        out.push_back((plus - minus) / (2.0 * h));
    }
    return out;
}

FieldSample sample(const OperatorField& phi, const VectorXd& u) {
    const ImmersionChart& chart = phi.chart();
    FieldSample s{geometry::frame_at(chart, u), {}, symop::SymOp::zero(1), 0.0, {}, {}, {}, {}};
    const FrameData& f = s.frame;
    const int m = f.dim();
    s.mixed = phi.mixed(f);
    if (s.mixed.rows() != m || s.mixed.cols() != m) {
        throw Error(ErrorCode::Domain, "field '" + phi.name() + "' returned a matrix of the wrong size");
    }
    const MatrixXd lowered = f.metric * s.mixed;
    const double asym = (lowered - lowered.transpose()).norm();
    if (asym > 1e-8 * (1.0 + lowered.norm())) {
        throw Error(ErrorCode::Domain, "field '" + phi.name() + "' is not g-self-adjoint at " + where(u));
    }
    s.phi = f.to_orthonormal(s.mixed);
    if (phi.positivity_required()) {
        const symop::Spectrum spec = symop::spectrum(s.phi);
        const double scale = std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff());
        if (spec.eigenvalues(0) < -1e-9 * scale) {
            std::ostringstream os;
            os << "field '" << phi.name() << "' has eigenvalue " << spec.eigenvalues(0) << " at " << where(u);
            throw Error(ErrorCode::NotPositiveSemidefinite, os.str());
        }
    }
    s.trace = s.mixed.trace();

    const std::vector<MatrixXd> d = phi.partials(f);
    s.divergence = VectorXd::Zero(m);
    for (int a = 0; a < m; ++a) {
        MatrixXd gamma(m, m); // gamma(k, l) = Gamma^k_{a l}
        for (int k = 0; k < m; ++k) gamma.row(k) = f.christoffel[static_cast<std::size_t>(k)].row(a);
        s.covariant.push_back(d[static_cast<std::size_t>(a)] + gamma * s.mixed - s.mixed * gamma);
    }
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            s.divergence += f.inverse_metric(a, b) * s.covariant[static_cast<std::size_t>(a)].col(b);
        }
    }
    s.divergence_ambient = f.to_ambient(s.divergence);

    s.mean_curvature = VectorXd::Zero(f.point.size());
    for (int alpha = 0; alpha < f.codim(); ++alpha) {
        const MatrixXd ii_ginv = f.second_form[static_cast<std::size_t>(alpha)] * f.inverse_metric;
        s.mean_curvature += (s.mixed.array() * ii_ginv.array()).sum() * f.normals.col(alpha);
    }
    return s;
}

double phi_divergence(const OperatorField& phi, const geometry::ChartVectorField& x, const VectorXd& u) {
    const FrameData f = geometry::frame_at(phi.chart(), u);
    return phi_divergence_at(phi.chart(), f, phi.mixed(f), x, phi.diff_step());
}

double tangent_divergence(const ImmersionChart& chart, const CoordVectorField& y, const VectorXd& u,
                          double step) {
    auto density = [&](const VectorXd& v) {
        return std::sqrt(gram(chart.ambient(), tangent_basis(chart, v)).determinant());
    };
    double total = 0.0;
    for (int a = 0; a < u.size(); ++a) {
        const double h = axis_step(step, u, a);
        const VectorXd p = shifted(u, a, h);
        const VectorXd q = shifted(u, a, -h);
        total += (density(p) * y(p)(a) - density(q) * y(q)(a)) / (2.0 * h);
    }
    return total / density(u);
}

CoordVectorField tangential_part(const ImmersionChart& chart, geometry::ChartVectorField x) {
    return [chart, x = std::move(x)](const VectorXd& u) -> VectorXd {
        const MatrixXd t = tangent_basis(chart, u);
        const auto& amb = chart.ambient();
        const VectorXd xv = x(u);
        VectorXd pair(t.cols());
        for (Eigen::Index b = 0; b < t.cols(); ++b) pair(b) = amb.inner(xv, t.col(b));
        return gram(amb, t).ldlt().solve(pair);
    };
}

geometry::ChartVectorField lifted_gradient(const ImmersionChart& chart, ScalarField f) {
    return [chart, f = std::move(f)](const VectorXd& u) -> VectorXd {
        const MatrixXd t = tangent_basis(chart, u);
        return t * gram(chart.ambient(), t).ldlt().solve(f.partials(u));
    };
}

double ExpansionResiduals::max() const { return std::max({r_a, r_b, r_c}); }

ExpansionResiduals divergence_expansion_residuals(const OperatorField& phi, const geometry::ChartVectorField& x,
                                           const ScalarField& f, const VectorXd& u) {
    const ImmersionChart& chart = phi.chart();
    const FieldSample s = sample(phi, u);
    const auto& amb = chart.ambient();
    const double step = phi.diff_step();

    const double dx = phi_divergence_at(chart, s.frame, s.mixed, x, step);
    const CoordVectorField xt = tangential_part(chart, x);
    const geometry::ChartVectorField xt_ambient = [chart, xt](const VectorXd& v) -> VectorXd {
        return tangent_basis(chart, v) * xt(v);
    };
    const double dxt = phi_divergence_at(chart, s.frame, s.mixed, xt_ambient, step);
    const VectorXd xu = x(u);
    const double hx = amb.inner(s.mean_curvature, xu);

    const geometry::ChartVectorField fx = [&](const VectorXd& v) -> VectorXd { return f(v) * x(v); };
    const double dfx = phi_divergence_at(chart, s.frame, s.mixed, fx, step);
    const double phi_xt_grad = (s.mixed * xt(u)).dot(f.partials(u));

    const CoordVectorField y = [&](const VectorXd& v) -> VectorXd { return phi.mixed(v) * xt(v); };
    const double div_y = tangent_divergence(chart, y, u, step);
    const double hdx = amb.inner(s.mean_curvature + s.divergence_ambient, xu);

    ExpansionResiduals r;
    r.r_a = std::abs(dx - (dxt - hx));
    r.r_b = std::abs(dfx - (f(u) * dx + phi_xt_grad));
    r.r_c = std::abs(dx - (div_y - hdx));
    r.scale = 1.0 + std::abs(dx) + std::abs(dxt) + std::abs(hx) + std::abs(dfx) + std::abs(phi_xt_grad) +
              std::abs(div_y) + std::abs(hdx);
    return r;
}

double cheng_yau(const OperatorField& phi, const ScalarField& f, const VectorXd& u) {
    return phi_divergence(phi, lifted_gradient(phi.chart(), f), u);
}

double codazzi_residual(const OperatorField& b, const VectorXd& u, const VectorXd& x, const VectorXd& y) {
    const FieldSample s = sample(b, u);
    VectorXd v = VectorXd::Zero(s.frame.dim());
    for (int a = 0; a < s.frame.dim(); ++a) {
        const MatrixXd& c = s.covariant[static_cast<std::size_t>(a)];
        v += x(a) * (c * y) - y(a) * (c * x);
    }
    return s.frame.tangent_norm(v);
}

double newton_divergence_check(const ImmersionChart& chart, int j, const VectorXd& u) {
    if (chart.codim() != 1) {
        throw Error(ErrorCode::Unsupported, "newton_divergence_check needs codimension 1");
    }
    if (j < 1 || j > chart.dim() - 1) throw Error(ErrorCode::Domain, "need 1 <= j <= m-1");
    return sample(OperatorField::newton(chart, j), u).divergence_norm();
}

FoliationResidual foliation_identity_residual(const OperatorField& distribution, const VectorXd& u) {
    const auto& spanning = distribution.spanning();
    if (spanning.empty()) {
        throw Error(ErrorCode::Unsupported, "field '" + distribution.name() + "' has no spanning fields");
    }
    const ImmersionChart& chart = distribution.chart();
    const auto& amb = chart.ambient();
    const FieldSample s = sample(distribution, u); // also rejects dependent spanning fields
    const int k = static_cast<int>(spanning.size());

    // Leaf through u: s -> Flow_1^{s_1} o ... o Flow_k^{s_k}(u).
    auto leaf = [&](const VectorXd& t) {
        VectorXd v = u;
        for (int l = k - 1; l >= 0; --l) v = flow(spanning[static_cast<std::size_t>(l)], v, t(l));
        return chart(v);
    };
    const double h = distribution.diff_step();
    const VectorXd x0 = chart(u);
    const VectorXd zero = VectorXd::Zero(k);
    std::vector<VectorXd> plus(k), minus(k);
    MatrixXd tangents(x0.size(), k);
    for (int i = 0; i < k; ++i) {
        plus[i] = leaf(shifted(zero, i, h));
        minus[i] = leaf(shifted(zero, i, -h));
        tangents.col(i) = amb.project_to_tangent(x0, (plus[i] - minus[i]) / (2.0 * h));
    }
    const MatrixXd metric = gram(amb, tangents);
    const MatrixXd inverse = metric.inverse();
    auto normal_to_leaf = [&](VectorXd v) {
        v = amb.project_to_tangent(x0, v);
        VectorXd pair(k);
        for (int i = 0; i < k; ++i) pair(i) = amb.inner(v, tangents.col(i));
        return (v - tangents * (inverse * pair)).eval();
    };
    VectorXd mean = VectorXd::Zero(x0.size());
    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            VectorXd second;
            if (i == j) {
                second = (plus[i] - 2.0 * x0 + minus[i]) / (h * h);
            } else {
                VectorXd t = zero;
                t(i) = h;
                t(j) = h;
                const VectorXd pp = leaf(t);
                t(j) = -h;
                const VectorXd pm = leaf(t);
                t(i) = -h;
                const VectorXd mm = leaf(t);
                t(j) = h;
                const VectorXd mp = leaf(t);
                second = (pp - pm - mp + mm) / (4.0 * h * h);
            }
            const double weight = i == j ? inverse(i, i) : 2.0 * inverse(i, j);
            mean += weight * normal_to_leaf(second);
        }
    }

    FoliationResidual out;
    out.leaf_mean_curvature = mean;
    out.operator_side = s.divergence_ambient + s.mean_curvature;
    out.residual = amb.norm(mean - out.operator_side);
    return out;
}

} // namespace tracegrowth::fields
