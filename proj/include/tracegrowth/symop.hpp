#pragma once

#include <Eigen/Dense>

#include <span>

namespace tracegrowth::symop {

/// Dense symmetric operator on an m-dimensional inner-product space,
/// represented in an orthonormal basis. Construction symmetrizes its input,
/// so entries(i, j) == entries(j, i) holds bit-for-bit.
class SymOp {
public:
    explicit SymOp(const Eigen::MatrixXd& entries);

    static SymOp identity(int dim);
    static SymOp zero(int dim);
    static SymOp diagonal(std::span<const double> values);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& matrix() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

    double trace() const { return entries_.trace(); }
    double frobenius_norm() const { return entries_.norm(); }

    SymOp operator+(const SymOp& other) const;
    SymOp operator-(const SymOp& other) const;
    SymOp operator*(double s) const;

private:
    Eigen::MatrixXd entries_;
};

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    int dim() const { return static_cast<int>(eigenvalues.size()); }
};

Spectrum spectrum(const SymOp& op);

/// S_j of a list of reals; S_0 = 1. Throws ErrorCode::Domain unless 0 <= j <= size.
double elementary_symmetric(std::span<const double> values, int j);
double elementary_symmetric(const Spectrum& spec, int j);

/// Same as elementary_symmetric but S_j = 0 for j > m (empty sum).
double elementary_symmetric_extended(std::span<const double> values, int j);

/// S_j of the eigenvalue list with the k-th eigenvalue removed (k is 0-based),
/// i.e. S_j(T|_{e_k^perp}). Requires 0 <= k < m and 0 <= j <= m-1.
double restricted_symmetric(const Spectrum& spec, int k, int j);

/// Newton operator P_j(T) evaluated by the matrix recursion
/// P_0 = I, P_j = S_j I - T P_{j-1}. Requires 0 <= j <= m.
SymOp newton_operator(const SymOp& op, int j);

struct TraceResiduals {
    double r_b = 0.0; // tr P_j - (m-j) S_j
    double r_c = 0.0; // tr(T P_j) - (j+1) S_{j+1}
    double r_d = 0.0; // tr(T^2 P_j) - (S_1 S_{j+1} - (j+2) S_{j+2})

    double max() const;
};

/// Relative residuals |lhs - rhs| / max(1, |lhs|, |rhs|) of the three trace
/// identities of the Newton operators. Requires 1 <= j <= m-1.
TraceResiduals trace_identities(const SymOp& op, int j);

/// Largest relative deviation between the eigenvalue of P_j(T) on each
/// eigenvector e_k and S_j(T_k). Spectral-route oracle for the recursion.
double eigen_identity_residual(const SymOp& op, int j);

enum class Definiteness { PositiveSemi, NegativeSemi, Indefinite };

const char* to_string(Definiteness d);

/// Sign class of the spectrum with slack tol * max(1, max|lambda|).
/// The zero operator classifies as PositiveSemi.
Definiteness semidefinite_class(const SymOp& op, double tol);

/// Count of singular values above tol * sigma_max.
int numeric_rank(const SymOp& op, double tol = 1e-8);

/// Contrapositive check of the rank bound on one instance: false only when
/// |S_{j-1}| <= tol, |S_j| <= tol and rank(T) > j - 2. Requires 2 <= j <= m.
bool rank_bound_witness(const SymOp& op, int j, double tol = 1e-8);

/// ||P_j T - T P_j||_F.
double commutator_norm(const SymOp& a, const SymOp& b);

} // namespace tracegrowth::symop
