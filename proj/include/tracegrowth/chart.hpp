#pragma once

#include "tracegrowth/ambient.hpp"
#include "tracegrowth/symop.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tracegrowth::comparison {
class ComparisonProfile;
}

namespace tracegrowth::geometry {

using ChartMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// A vector field along the immersion: parameter point -> ambient coordinate vector.
using ChartVectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Scalar function of the parameter point.
using ChartScalar = std::function<double(const Eigen::VectorXd&)>;

/// Axis-aligned parameter box. Periodic axes wrap into [lower, upper).
struct ParamDomain {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::vector<bool> periodic;

    int dim() const { return static_cast<int>(lower.size()); }
    double period(int axis) const { return upper(axis) - lower(axis); }
    Eigen::VectorXd wrap(const Eigen::VectorXd& u) const;
    /// True if u lies inside the box with at least `margin` to every
    /// non-periodic face.
    bool contains(const Eigen::VectorXd& u, double margin = 0.0) const;
};

struct ChartOptions {
    double fd_step = 1e-4;
    bool richardson = false;
    /// Sign convention for the unit normal in codimension 1: +1 makes
    /// (tangents..., normal) positively oriented, -1 flips it.
    int orientation = 1;
};

/// Parametrization f : U in R^m -> ambient, evaluated by plain function calls.
/// All derivatives are central finite differences with per-axis step
/// fd_step * (1 + |u_i|).
class ImmersionChart {
public:
    ImmersionChart(std::string name, AmbientSpace ambient, ParamDomain domain, ChartMap map,
                   Eigen::VectorXd base_point, ChartOptions options = {});

    const std::string& name() const { return name_; }
    const AmbientSpace& ambient() const { return ambient_; }
    const ParamDomain& domain() const { return domain_; }
    int dim() const { return domain_.dim(); }
    int codim() const { return ambient_.dim() - dim(); }
    const ChartOptions& options() const { return options_; }
    double fd_step() const { return options_.fd_step; }

    const Eigen::VectorXd& base_point() const { return base_point_; }
    const Eigen::VectorXd& base_image() const { return base_image_; }

    Eigen::VectorXd operator()(const Eigen::VectorXd& u) const;

    Eigen::VectorXd step_sizes(const Eigen::VectorXd& u) const;

    ImmersionChart with_options(ChartOptions options) const;
    ImmersionChart with_base_point(const Eigen::VectorXd& base) const;

    /// coord_dim x m matrix of coordinate tangent vectors.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const;

private:
    std::string name_;
    AmbientSpace ambient_;
    ParamDomain domain_;
    ChartMap map_;
    Eigen::VectorXd base_point_;
    Eigen::VectorXd base_image_;
    ChartOptions options_;
};

/// First- and second-order data of the immersion at one parameter point.
struct FrameData {
    Eigen::VectorXd u;
    Eigen::VectorXd point;
    Eigen::MatrixXd tangents;       // columns d_a f
    Eigen::MatrixXd metric;         // g_ab
    Eigen::MatrixXd inverse_metric; // g^ab
    Eigen::MatrixXd cholesky;       // lower L with g = L L^T
    std::vector<Eigen::MatrixXd> christoffel; // christoffel[k](a, b) = Gamma^k_ab
    Eigen::MatrixXd normals;                  // orthonormal normal frame, columns
    std::vector<Eigen::MatrixXd> second_form; // second_form[alpha](a, b) = <II(d_a, d_b), nu_alpha>
    Eigen::VectorXd mean_curvature;           // H in the normal frame
    std::optional<Eigen::MatrixXd> shape_mixed; // A^a_b, codimension 1 only
    std::optional<symop::SymOp> shape;          // A in the orthonormal frame E = d f L^{-T}

    int dim() const { return static_cast<int>(metric.rows()); }
    int codim() const { return static_cast<int>(normals.cols()); }

    /// Coordinate components of the tangential projection of an ambient vector.
    Eigen::VectorXd tangent_components(const AmbientSpace& ambient, const Eigen::VectorXd& v) const;
    Eigen::VectorXd to_ambient(const Eigen::VectorXd& components) const { return tangents * components; }
    Eigen::VectorXd normal_part(const AmbientSpace& ambient, const Eigen::VectorXd& v) const;
    Eigen::VectorXd mean_curvature_vector() const { return normals * mean_curvature; }

    /// g-norm of a tangent vector given by coordinate components.
    double tangent_norm(const Eigen::VectorXd& components) const;

    /// Columns of the g-orthonormal frame E = d f L^{-T}.
    Eigen::MatrixXd orthonormal_frame() const;
    /// Mixed components M^a_b of a g-self-adjoint operator -> SymOp in the frame E.
    symop::SymOp to_orthonormal(const Eigen::MatrixXd& mixed) const;
    Eigen::MatrixXd from_orthonormal(const symop::SymOp& op) const;
};

/// Throws ErrorCode::DegenerateChart when the differential loses rank
/// (smallest singular value <= 1e-6) or the induced metric is not SPD.
FrameData frame_at(const ImmersionChart& chart, const Eigen::VectorXd& u);

struct RadialData {
    double r = 0.0;
    Eigen::VectorXd grad_ambient;       // unit ambient gradient of r
    Eigen::VectorXd grad_tangent;       // its tangential projection, as an ambient vector
    Eigen::VectorXd grad_tangent_coords;
    Eigen::VectorXd grad_normal;        // normal part of the ambient gradient
    double tangent_norm = 0.0;          // |grad r| on M, <= 1
};

/// Ambient distance to the image of the base point and its gradients.
/// Throws ErrorCode::SingularRadialField at the base point itself.
RadialData ambient_radial(const ImmersionChart& chart, const FrameData& frame);
RadialData ambient_radial(const ImmersionChart& chart, const Eigen::VectorXd& u);

/// r only; no frame required.
double ambient_distance(const ImmersionChart& chart, const Eigen::VectorXd& u);

/// X = h(r) grad r at f(u). Throws ErrorCode::ProfileDomain outside the profile domain.
Eigen::VectorXd radial_vector_field(const ImmersionChart& chart, const Eigen::VectorXd& u,
                                    const comparison::ComparisonProfile& profile);

/// The same field as a ChartVectorField (captures both arguments by value).
ChartVectorField radial_field(const ImmersionChart& chart,
                              const comparison::ComparisonProfile& profile);

/// Y = r grad r = (x - q0) in flat ambients; h(t) = t in general.
ChartVectorField position_field(const ImmersionChart& chart);

} // namespace tracegrowth::geometry
