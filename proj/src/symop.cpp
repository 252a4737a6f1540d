#include "tracegrowth/symop.hpp"

#include "tracegrowth/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace tracegrowth::symop {

namespace {

double relative(double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

} // namespace

SymOp::SymOp(const Eigen::MatrixXd& entries) {
    if (entries.rows() < 1 || entries.rows() != entries.cols()) {
        throw Error(ErrorCode::Domain, "SymOp needs a non-empty square matrix, got " +
                                           std::to_string(entries.rows()) + "x" +
                                           std::to_string(entries.cols()));
    }
    entries_ = 0.5 * (entries + entries.transpose());
}

SymOp SymOp::identity(int dim) { return SymOp(Eigen::MatrixXd::Identity(dim, dim)); }

SymOp SymOp::zero(int dim) { return SymOp(Eigen::MatrixXd::Zero(dim, dim)); }

SymOp SymOp::diagonal(std::span<const double> values) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) d(static_cast<Eigen::Index>(i)) = values[i];
    return SymOp(d.asDiagonal().toDenseMatrix());
}

SymOp SymOp::operator+(const SymOp& other) const { return SymOp(entries_ + other.entries_); }
SymOp SymOp::operator-(const SymOp& other) const { return SymOp(entries_ - other.entries_); }
SymOp SymOp::operator*(double s) const { return SymOp(entries_ * s); }

Spectrum spectrum(const SymOp& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix());
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double elementary_symmetric(std::span<const double> values, int j) {
    const int m = static_cast<int>(values.size());
    if (j < 0 || j > m) {
        throw Error(ErrorCode::Domain, "elementary symmetric index " + std::to_string(j) +
                                           " outside [0, " + std::to_string(m) + "]");
    }
    // Coefficients of prod (1 + lambda_i x), built one factor at a time.
    std::vector<double> e(static_cast<std::size_t>(j) + 1, 0.0);
    e[0] = 1.0;
    for (double lambda : values) {
        for (int k = j; k >= 1; --k) e[k] += lambda * e[k - 1];
    }
    return e[j];
}

double elementary_symmetric(const Spectrum& spec, int j) {
    return elementary_symmetric(to_vector(spec.eigenvalues), j);
}

double elementary_symmetric_extended(std::span<const double> values, int j) {
    if (j > static_cast<int>(values.size())) return 0.0;
    return elementary_symmetric(values, j);
}

double restricted_symmetric(const Spectrum& spec, int k, int j) {
    const int m = spec.dim();
    if (k < 0 || k >= m) {
        throw Error(ErrorCode::Domain, "eigen index " + std::to_string(k) + " outside [0, " +
                                           std::to_string(m) + ")");
    }
    if (j < 0 || j > m - 1) {
        throw Error(ErrorCode::Domain, "restricted symmetric index " + std::to_string(j) +
                                           " outside [0, " + std::to_string(m - 1) + "]");
    }
    std::vector<double> rest;
    rest.reserve(static_cast<std::size_t>(m) - 1);
    for (int i = 0; i < m; ++i) {
        if (i != k) rest.push_back(spec.eigenvalues(i));
    }
    return elementary_symmetric(rest, j);
}

SymOp newton_operator(const SymOp& op, int j) {
    const int m = op.dim();
    if (j < 0 || j > m) {
        throw Error(ErrorCode::Domain, "Newton operator index " + std::to_string(j) +
                                           " outside [0, " + std::to_string(m) + "]");
    }
    const auto lambdas = to_vector(spectrum(op).eigenvalues);
    const Eigen::MatrixXd& t = op.matrix();
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m);
    for (int k = 1; k <= j; ++k) {
        Eigen::MatrixXd next = -t * p;
        next.diagonal().array() += elementary_symmetric(lambdas, k);
        p = std::move(next);
    }
    return SymOp(p);
}

double TraceResiduals::max() const { return std::max({r_b, r_c, r_d}); }

TraceResiduals trace_identities(const SymOp& op, int j) {
    const int m = op.dim();
    if (j < 1 || j > m - 1) {
        throw Error(ErrorCode::Domain, "trace identities need 1 <= j <= m-1, got j=" +
                                           std::to_string(j) + ", m=" + std::to_string(m));
    }
    const auto lambdas = to_vector(spectrum(op).eigenvalues);
    auto s = [&](int k) { return elementary_symmetric_extended(lambdas, k); };

    const Eigen::MatrixXd p = newton_operator(op, j).matrix();
    const Eigen::MatrixXd& t = op.matrix();
    const Eigen::MatrixXd tp = t * p;

    TraceResiduals out;
    out.r_b = relative(p.trace(), (m - j) * s(j));
    out.r_c = relative(tp.trace(), (j + 1) * s(j + 1));
    out.r_d = relative((t * tp).trace(), s(1) * s(j + 1) - (j + 2) * s(j + 2));
    return out;
}

double eigen_identity_residual(const SymOp& op, int j) {
    const Spectrum spec = spectrum(op);
    const Eigen::MatrixXd p = newton_operator(op, j).matrix();
    double worst = 0.0;
    for (int k = 0; k < spec.dim(); ++k) {
        const Eigen::VectorXd e = spec.eigenvectors.col(k);
        const double on_ek = e.dot(p * e);
        // P_j e_k must also stay parallel to e_k.
        const double off = (p * e - on_ek * e).norm();
        const double expected = restricted_symmetric(spec, k, j);
        worst = std::max({worst, relative(on_ek, expected), off / std::max(1.0, std::abs(expected))});
    }
    return worst;
}

const char* to_string(Definiteness d) {
    switch (d) {
        case Definiteness::PositiveSemi: return "PositiveSemi";
        case Definiteness::NegativeSemi: return "NegativeSemi";
        case Definiteness::Indefinite: return "Indefinite";
    }
    return "?";
}

Definiteness semidefinite_class(const SymOp& op, double tol) {
    if (tol < 0.0) throw Error(ErrorCode::Domain, "negative slack");
    const Eigen::VectorXd lambdas = spectrum(op).eigenvalues;
    const double slack = tol * std::max(1.0, lambdas.cwiseAbs().maxCoeff());
    if (lambdas.minCoeff() >= -slack) return Definiteness::PositiveSemi;
    if (lambdas.maxCoeff() <= slack) return Definiteness::NegativeSemi;
    return Definiteness::Indefinite;
}

int numeric_rank(const SymOp& op, double tol) {
    const Eigen::VectorXd sigma = spectrum(op).eigenvalues.cwiseAbs();
    const double top = sigma.maxCoeff();
    if (top == 0.0) return 0;
    return static_cast<int>((sigma.array() > tol * top).count());
}

bool rank_bound_witness(const SymOp& op, int j, double tol) {
    const int m = op.dim();
    if (j < 2 || j > m) {
        throw Error(ErrorCode::Domain, "rank bound needs 2 <= j <= m, got j=" + std::to_string(j));
    }
    const auto lambdas = to_vector(spectrum(op).eigenvalues);
    const bool hypothesis = std::abs(elementary_symmetric(lambdas, j - 1)) <= tol &&
                            std::abs(elementary_symmetric(lambdas, j)) <= tol;
    return !(hypothesis && numeric_rank(op, tol) > j - 2);
}

double commutator_norm(const SymOp& a, const SymOp& b) {
    return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm();
}

} // namespace tracegrowth::symop
