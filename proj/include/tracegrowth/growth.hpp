#pragma once

#include "tracegrowth/fields.hpp"
#include "tracegrowth/mesh.hpp"
#include "tracegrowth/profile.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace tracegrowth::ballgrowth {

struct GrowthOptions {
    double mu_max = 0.0;
    /// Defaults to 0.1 * mu_max.
    std::optional<double> mu0;
    /// Throw HypothesisViolated when tr Phi(q0) <= 0.
    bool require_lambda = true;
};

struct GrowthCurve {
    std::vector<double> mu;
    std::vector<double> f; // int_{B_mu} tr Phi
    std::vector<double> K; // int_{B_mu} h(r) tr Phi
    std::vector<double> F; // dK/dmu
    std::vector<double> G; // int_{B_mu} (h'(r) - alpha(r) h(r)) tr Phi
    double mu0 = 0.0;
    double G_mu0 = 0.0;
    double lambda = 0.0;        // G(mu0) / h(mu0)
    double trace_at_base = 0.0; // tr Phi(q0)
    int dim = 2;

    double tail_lo = 0.0;
    double tail_hi = 0.0;
    double rate_log = 0.0;    // min f / log(mu) on the tail window
    double rate_linear = 0.0; // min f / mu on the tail window

    /// Linear interpolation of f on the grid.
    double f_at(double mu) const;
    double secant_slope(double lo, double hi) const { return (f_at(hi) - f_at(lo)) / (hi - lo); }
};

/// mu-grid spacing is twice the lattice spacing; F by central differences of K.
/// InsufficientResolution when mu_max exceeds the meshed region.
GrowthCurve growth_curve(const MeshedBall& ball, const fields::OperatorField& phi,
                         const comparison::ComparisonProfile& profile, const GrowthOptions& options);

enum class HypothesisKind { Psd, AlphaBound, RadialBound, ScalarBound, EndBound };

std::string_view to_string(HypothesisKind kind);

struct HypothesisSpec {
    HypothesisKind kind = HypothesisKind::AlphaBound;
    double p = 1.0;           // ScalarBound / EndBound: weight of grad lambda
    double coefficient = 0.0; // ScalarBound: (m-1)c; EndBound: kappa
};

struct HypothesisReport {
    HypothesisKind kind = HypothesisKind::AlphaBound;
    std::vector<double> margins; // per node, normalized; NaN outside the checked radius
    double min_margin = 0.0;
    std::size_t worst_node = 0;
    Eigen::Vector2d worst_u = Eigen::Vector2d::Zero();
    int nodes_checked = 0;
    bool verdict = false;
};

/// Pointwise margins (rhs - lhs) / (1 + |lhs| + |rhs|) at every node with rho <= radius:
///   Psd:           lowest eigenvalue of Phi
///   AlphaBound:    alpha(r) tr Phi - |H_Phi + div Phi|
///   RadialBound:   tr Phi - m |Phi grad r|          (grad r = 0 at the pole)
///   ScalarBound: coefficient lambda - |lambda H + p grad lambda|
///   EndBound:      same form, coefficient = kappa
/// The lambda kinds need a field from OperatorField::lambda_identity.
std::vector<HypothesisReport> hypothesis_check(const MeshedBall& ball, const fields::OperatorField& phi,
                                               const comparison::ComparisonProfile& profile,
                                               const std::vector<HypothesisSpec>& specs, double radius,
                                               double tol = 1e-3);

enum class TheoremId { LambdaBound, LogGrowth, LinearGrowth, TraceBound, RateClosedForm };

std::string_view to_string(TheoremId id);
std::optional<TheoremId> theorem_from_string(std::string_view name);

struct BoundTable {
    TheoremId id = TheoremId::LambdaBound;
    std::vector<double> mu;
    std::vector<double> bound;
    std::vector<double> margin; // f - bound
    double window_lo = 0.0;
    double window_hi = 0.0;
    double min_relative_margin = 0.0; // min (f - bound) / |bound| in the window
    bool satisfied = false;
};

/// Evaluates the lower bound of the selected theorem on the curve's grid and
/// checks f >= bound (1 - tol) inside the valid window. Throws
/// HypothesisViolated unless the reports contain passing verdicts for every
/// hypothesis the theorem needs.
BoundTable theorem_bound(const GrowthCurve& curve, const comparison::ComparisonProfile& profile, TheoremId id,
                         const std::vector<HypothesisReport>& hypotheses, double tol = 0.0);

struct FGReport {
    double worst_f_minus_g = 0.0;   // min (F - G) / G over the window
    double worst_f_minus_mg = 0.0;  // min (F - mG) / (mG)
    double worst_g_minus_bound = 0.0; // min (G - Lambda h e^{-int alpha}) / bound
    bool f_geq_g = false;
    bool f_geq_mg = false;
    bool g_geq_bound = false;
};

/// On-grid checks of F >= G, F >= m G and G >= Lambda h(mu) e^{-int_{mu0}^{mu} alpha}
/// for mu in [mu0, min(mu_bound, mu_max)], with relative slack tol.
FGReport fg_checks(const GrowthCurve& curve, const comparison::ComparisonProfile& profile, double tol);

struct EndBallEstimate {
    double gamma = 0.0;    // m int_0^mu h^{m-1} e^{-m int alpha}
    double bound = 0.0;    // lambda(q) gamma
    double measured = 0.0; // int_{B_mu} lambda
};

/// ProfileDomain unless mu < mu_bound of the profile.
EndBallEstimate end_ball_estimate(const MeshedBall& ball, const fields::ScalarField& lambda,
                                  const comparison::ComparisonProfile& profile, double mu);

/// m int_0^mu h(t)^{m-1} exp(-m int_0^t alpha) dt.
double trace_bound_integral(const comparison::ComparisonProfile& profile, int m, double mu);

} // namespace tracegrowth::ballgrowth
