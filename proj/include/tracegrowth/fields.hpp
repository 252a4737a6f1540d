#pragma once

#include "tracegrowth/chart.hpp"
#include "tracegrowth/symop.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tracegrowth::fields {

using geometry::FrameData;
using geometry::ImmersionChart;

/// Tangent vector field given by its coordinate components.
using CoordVectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Scalar function on the chart with optional analytic coordinate partials.
class ScalarField {
public:
    using Value = std::function<double(const Eigen::VectorXd&)>;
    using Partials = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

    explicit ScalarField(Value value, std::optional<Partials> partials = std::nullopt,
                         double fd_step = 1e-4);

    static ScalarField constant(double v);
    /// lambda = fn(r), r the ambient distance to the base image; partials by
    /// the chain rule through the closed-form ambient gradient (zero at r = 0).
    static ScalarField radial(const ImmersionChart& chart, std::function<double(double)> fn,
                              std::function<double(double)> dfn);

    double operator()(const Eigen::VectorXd& u) const { return value_(u); }
    /// Coordinate partials d_a lambda; central differences when no analytic form is set.
    Eigen::VectorXd partials(const Eigen::VectorXd& u) const;
    bool has_analytic_partials() const { return partials_.has_value(); }

private:
    Value value_;
    std::optional<Partials> partials_;
    double fd_step_;
};

/// (1,1) field Phi on a chart, stored through its mixed coordinate components Phi^k_i.
class OperatorField {
public:
    using Eval = std::function<Eigen::MatrixXd(const FrameData&)>;
    /// Returns d_a Phi for a = 0..m-1.
    using Derivative = std::function<std::vector<Eigen::MatrixXd>(const FrameData&)>;

    OperatorField(std::string name, ImmersionChart chart, Eval eval,
                  std::optional<Derivative> derivative = std::nullopt,
                  bool positivity_required = false, double diff_step = 1e-3);

    static OperatorField identity(const ImmersionChart& chart);
    /// lambda^s I. Requires lambda >= 0 where s is not an integer.
    static OperatorField lambda_identity(const ImmersionChart& chart, ScalarField lambda, double s = 1.0);
    /// Shape operator A (codimension 1).
    static OperatorField shape_operator(const ImmersionChart& chart);
    /// Newton operator P_j(A) of the shape operator (codimension 1).
    static OperatorField newton(const ImmersionChart& chart, int j);
    /// g-orthogonal projection onto span of the given coordinate vector fields.
    static OperatorField distribution(const ImmersionChart& chart, std::vector<CoordVectorField> spanning);

    const std::string& name() const { return name_; }
    const ImmersionChart& chart() const { return chart_; }
    bool positivity_required() const { return positivity_required_; }
    double diff_step() const { return diff_step_; }
    const std::vector<CoordVectorField>& spanning() const { return spanning_; }
    const std::optional<ScalarField>& lambda() const { return lambda_; }
    double exponent() const { return exponent_; }

    OperatorField with_positivity(bool required) const;

    Eigen::MatrixXd mixed(const FrameData& frame) const { return eval_(frame); }
    Eigen::MatrixXd mixed(const Eigen::VectorXd& u) const;
    /// d_a Phi^k_i, analytic when available, otherwise central differences with
    /// step diff_step * (1 + |u_a|).
    std::vector<Eigen::MatrixXd> partials(const FrameData& frame) const;

private:
    std::string name_;
    ImmersionChart chart_;
    Eval eval_;
    std::optional<Derivative> derivative_;
    bool positivity_required_;
    double diff_step_;
    std::vector<CoordVectorField> spanning_;
    std::optional<ScalarField> lambda_;
    double exponent_ = 1.0;
};

struct FieldSample {
    FrameData frame;
    Eigen::MatrixXd mixed;                  // Phi^k_i
    symop::SymOp phi;                       // Phi in the g-orthonormal frame
    double trace = 0.0;
    std::vector<Eigen::MatrixXd> covariant; // covariant[a](k, i) = (nabla_a Phi)^k_i
    Eigen::VectorXd divergence;             // div Phi, coordinate components
    Eigen::VectorXd divergence_ambient;
    Eigen::VectorXd mean_curvature;         // H_Phi as an ambient vector

    double divergence_norm() const { return frame.tangent_norm(divergence); }
};

/// Throws NotPositiveSemidefinite when the field requires positivity and Phi
/// has an eigenvalue below -1e-9 * scale at u.
FieldSample sample(const OperatorField& phi, const Eigen::VectorXd& u);

/// D_Phi X = tr(Z -> Phi (nabla_Z X)^T) at u.
double phi_divergence(const OperatorField& phi, const geometry::ChartVectorField& x,
                      const Eigen::VectorXd& u);

/// Tangential divergence (1/sqrt g) d_a(sqrt g Y^a) of a coordinate vector field.
double tangent_divergence(const ImmersionChart& chart, const CoordVectorField& y,
                          const Eigen::VectorXd& u, double step = 1e-3);

/// Tangential part of an ambient field, as coordinate components.
CoordVectorField tangential_part(const ImmersionChart& chart, geometry::ChartVectorField x);

/// Intrinsic gradient of a scalar, lifted to an ambient vector field.
geometry::ChartVectorField lifted_gradient(const ImmersionChart& chart, ScalarField f);

struct ExpansionResiduals {
    double r_a = 0.0; // D X - (D X^T - <H_Phi, X>)
    double r_b = 0.0; // D(fX) - (f D X + <Phi X^T, grad f>)
    double r_c = 0.0; // D X - (div(Phi X^T) - <H_Phi + div Phi, X>)
    double scale = 1.0; // 1 + magnitudes of the terms involved

    double max() const;
};

ExpansionResiduals divergence_expansion_residuals(const OperatorField& phi, const geometry::ChartVectorField& x,
                                           const ScalarField& f, const Eigen::VectorXd& u);

/// Cheng-Yau operator D_Phi(grad f).
double cheng_yau(const OperatorField& phi, const ScalarField& f, const Eigen::VectorXd& u);

/// |(nabla_X B) Y - (nabla_Y B) X|_g for coordinate directions X, Y.
double codazzi_residual(const OperatorField& b, const Eigen::VectorXd& u, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y);

/// |div P_j(A)|_g. Unsupported unless codimension 1; Domain unless 1 <= j <= m-1.
double newton_divergence_check(const ImmersionChart& chart, int j, const Eigen::VectorXd& u);

struct FoliationResidual {
    Eigen::VectorXd leaf_mean_curvature; // trace of the leaf's second fundamental form in the ambient
    Eigen::VectorXd operator_side;       // div P_D + H_{P_D}
    double residual = 0.0;
};

/// Compares the leaf mean curvature (from a flow parametrization of the leaf
/// through u) with div P_D + H_{P_D}. The field must come from
/// OperatorField::distribution; DegenerateDistribution when the spanning
/// fields are dependent at u.
FoliationResidual foliation_identity_residual(const OperatorField& distribution, const Eigen::VectorXd& u);

} // namespace tracegrowth::fields
