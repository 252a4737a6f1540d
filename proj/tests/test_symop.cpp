#include "tracegrowth/error.hpp"
#include "tracegrowth/symop.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace tracegrowth;
using namespace tracegrowth::symop;

namespace {

// brute force over bitmasks
double subset_sum(const std::vector<double>& v, int j) {
    const int m = static_cast<int>(v.size());
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        if (__builtin_popcount(mask) != j) continue;
        double p = 1.0;
        for (int i = 0; i < m; ++i) {
            if (mask & (1u << i)) p *= v[static_cast<std::size_t>(i)];
        }
        total += p;
    }
    return total;
}

SymOp diag(std::vector<double> v) { return SymOp::diagonal(v); }

SymOp random_op(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd a(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) a(i, j) = u(rng);
    }
    return SymOp(a);
}

} // namespace

TEST(SymOp, ConstructionSymmetrizesExactly) {
    Eigen::MatrixXd a(3, 3);
    a << 1, 2, 3, 0.1, 5, 6, 7.3, 8, 9;
    SymOp s(a);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) EXPECT_EQ(s(i, j), s(j, i));
    }
    EXPECT_DOUBLE_EQ(s(0, 1), 1.05);
}

TEST(SymOp, SpectrumReconstructs) {
    std::mt19937_64 rng(7);
    for (int m = 2; m <= 6; ++m) {
        SymOp t = random_op(rng, m);
        Spectrum sp = spectrum(t);
        Eigen::MatrixXd rec = sp.eigenvectors * sp.eigenvalues.asDiagonal() * sp.eigenvectors.transpose();
        EXPECT_LE((rec - t.matrix()).norm(), 1e-10 * (1 + t.frobenius_norm()));
        EXPECT_LE((sp.eigenvectors.transpose() * sp.eigenvectors - Eigen::MatrixXd::Identity(m, m)).norm(), 1e-10);
        for (int i = 1; i < m; ++i) EXPECT_LE(sp.eigenvalues(i - 1), sp.eigenvalues(i));
    }
}

TEST(ElementarySymmetric, ReferenceExamples) {
    std::vector<double> v{1, 2, 3};
    EXPECT_DOUBLE_EQ(elementary_symmetric(v, 2), 11.0);
    EXPECT_DOUBLE_EQ(elementary_symmetric(std::vector<double>{1, 1, 1}, 0), 1.0);
    EXPECT_DOUBLE_EQ(elementary_symmetric(v, 3), 6.0);
    EXPECT_NEAR(elementary_symmetric(spectrum(diag(v)), 2), 11.0, 1e-12);
}

TEST(ElementarySymmetric, OutOfRangeThrows) {
    std::vector<double> v{1, 2, 3};
    try {
        elementary_symmetric(v, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Domain);
    }
    EXPECT_THROW(elementary_symmetric(v, -1), Error);
    EXPECT_EQ(elementary_symmetric_extended(v, 4), 0.0);
}

TEST(ElementarySymmetric, MatchesSubsetSums) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int m = 1; m <= 7; ++m) {
        std::vector<double> v(static_cast<std::size_t>(m));
        for (auto& x : v) x = n(rng);
        for (int j = 0; j <= m; ++j) EXPECT_NEAR(elementary_symmetric(v, j), subset_sum(v, j), 1e-12);
    }
}

TEST(NewtonOperator, ReferenceExamples) {
    SymOp p = newton_operator(SymOp::identity(3), 1);
    EXPECT_LE((p.matrix() - 2.0 * Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-14);

    SymOp q = newton_operator(diag({1, 2, 3}), 1);
    Eigen::MatrixXd want = Eigen::Vector3d(5, 4, 3).asDiagonal();
    EXPECT_LE((q.matrix() - want).norm(), 1e-14);

    EXPECT_NEAR(newton_operator(diag({1, 2, 3}), 3).trace(), 0.0, 1e-12);
    EXPECT_THROW(newton_operator(diag({1, 2, 3}), 4), Error);
}

TEST(NewtonOperator, ClosedFormPolynomial) {
    // P_j = sum_k (-1)^k S_{j-k} T^k
    std::mt19937_64 rng(11);
    for (int m = 2; m <= 6; ++m) {
        SymOp t = random_op(rng, m);
        Spectrum sp = spectrum(t);
        std::vector<double> ev(sp.eigenvalues.data(), sp.eigenvalues.data() + m);
        for (int j = 0; j <= m; ++j) {
            Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
            Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
            for (int k = 0; k <= j; ++k) {
                sum += ((k % 2) ? -1.0 : 1.0) * subset_sum(ev, j - k) * power;
                power = power * t.matrix();
            }
            EXPECT_LE((newton_operator(t, j).matrix() - sum).norm(), 1e-10 * (1 + sum.norm()));
        }
    }
}

TEST(NewtonOperator, CayleyHamiltonTail) {
    std::mt19937_64 rng(5);
    for (int m = 2; m <= 6; ++m) {
        SymOp t = random_op(rng, m);
        EXPECT_LE(newton_operator(t, m).frobenius_norm(), 1e-10);
    }
}

TEST(RestrictedSymmetric, ReferenceExamples) {
    Spectrum sp = spectrum(diag({1, 2, 3}));
    EXPECT_NEAR(restricted_symmetric(sp, 0, 1), 5.0, 1e-12);
    EXPECT_NEAR(restricted_symmetric(sp, 1, 0), 1.0, 1e-12);
    EXPECT_NEAR(restricted_symmetric(sp, 2, 2), 2.0, 1e-12);
    EXPECT_THROW(restricted_symmetric(sp, 3, 0), Error);
    EXPECT_THROW(restricted_symmetric(sp, 0, 3), Error);
}

TEST(TraceIdentities, ReferenceExamples) {
    SymOp t = diag({1, 2, 3});
    SymOp p1 = newton_operator(t, 1);
    EXPECT_NEAR((t.matrix() * p1.matrix()).trace(), 22.0, 1e-12);
    EXPECT_NEAR((t.matrix() * t.matrix() * p1.matrix()).trace(), 48.0, 1e-12);
    TraceResiduals r = trace_identities(t, 1);
    EXPECT_LE(r.max(), 1e-14);
    for (int j = 1; j <= 2; ++j) EXPECT_EQ(trace_identities(SymOp::zero(3), j).max(), 0.0);
}

TEST(TraceIdentities, RandomOperators) {
    std::mt19937_64 rng(1);
    double worst = 0.0, eig = 0.0, comm = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const int m = 2 + n % 5;
        SymOp t = random_op(rng, m);
        for (int j = 1; j <= m - 1; ++j) {
            worst = std::max(worst, trace_identities(t, j).max());
            eig = std::max(eig, eigen_identity_residual(t, j));
            const double scale = std::pow(1.0 + t.frobenius_norm(), j + 1);
            comm = std::max(comm, commutator_norm(newton_operator(t, j), t) / scale);
        }
    }
    EXPECT_LE(worst, 1e-9);
    EXPECT_LE(eig, 1e-8);
    EXPECT_LE(comm, 1e-9);
}

TEST(Semidefinite, ReferenceExamples) {
    EXPECT_EQ(semidefinite_class(newton_operator(diag({1, -1}), 1), 1e-9), Definiteness::Indefinite);
    EXPECT_EQ(semidefinite_class(newton_operator(diag({1, 0}), 1), 1e-9), Definiteness::PositiveSemi);
    for (int j = 0; j <= 3; ++j) {
        EXPECT_EQ(semidefinite_class(newton_operator(SymOp::identity(4), j), 1e-9), Definiteness::PositiveSemi);
    }
    EXPECT_EQ(semidefinite_class(diag({-1, -2}), 1e-9), Definiteness::NegativeSemi);
    EXPECT_EQ(semidefinite_class(SymOp::zero(2), 1e-9), Definiteness::PositiveSemi);
}

TEST(Semidefinite, VanishingNextSymmetric) {
    // last eigenvalue solved from S_{j+1} = 0, basis rotated by a random orthogonal Q
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int indefinite = 0, built = 0;
    while (built < 200) {
        const int m = 2 + built % 5;
        const int j = built % (m - 1) + 1;
        std::vector<double> free(static_cast<std::size_t>(m - 1));
        for (auto& x : free) x = u(rng);
        const double cof = subset_sum(free, j);
        if (std::abs(cof) < 1e-3) continue;
        std::vector<double> ev = free;
        ev.push_back(-subset_sum(free, j + 1) / cof);
        Eigen::MatrixXd a(m, m);
        for (int i = 0; i < m; ++i) {
            for (int k = 0; k < m; ++k) a(i, k) = u(rng);
        }
        Eigen::MatrixXd q = a.householderQr().householderQ();
        Eigen::VectorXd lam = Eigen::Map<Eigen::VectorXd>(ev.data(), m);
        SymOp t(q * lam.asDiagonal() * q.transpose());
        if (semidefinite_class(newton_operator(t, j), 1e-9) == Definiteness::Indefinite) ++indefinite;
        ++built;
    }
    EXPECT_EQ(indefinite, 0);
}

TEST(RankWitness, ReferenceExamples) {
    EXPECT_TRUE(rank_bound_witness(diag({1, 0, 0}), 2));
    EXPECT_TRUE(rank_bound_witness(diag({2.5, 0, 0, 0}), 3));
    for (int j = 2; j <= 4; ++j) EXPECT_TRUE(rank_bound_witness(SymOp::zero(4), j));
    EXPECT_EQ(numeric_rank(diag({2.5, 0, 0, 0})), 1);
    EXPECT_THROW(rank_bound_witness(diag({1, 2}), 1), Error);
}

TEST(RankWitness, RandomInstances) {
    std::mt19937_64 rng(9);
    for (int n = 0; n < 300; ++n) {
        const int m = 2 + n % 5;
        SymOp t = random_op(rng, m);
        for (int j = 2; j <= m; ++j) EXPECT_TRUE(rank_bound_witness(t, j));
    }
}
