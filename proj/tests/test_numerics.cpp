#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "mascyber/errors.hpp"
#include "mascyber/numerics.hpp"

using namespace mascyber;

TEST(Kron, SmallExample) {
    const Matrix a = (Matrix(2, 2) << 1, 2, 3, 4).finished();
    const Matrix b = (Matrix(1, 2) << 0, 5).finished();
    const Matrix expected = (Matrix(2, 4) << 0, 5, 0, 10, 0, 15, 0, 20).finished();
    EXPECT_EQ(kron(a, b), expected);
}

TEST(Kron, IdentityGivesBlockDiagonal) {
    const Matrix b = (Matrix(2, 2) << 1, 2, 3, 4).finished();
    const Matrix k = kron(Matrix(Matrix::Identity(3, 3)), b);
    const std::vector<Matrix> blocks(3, b);
    EXPECT_EQ(k, block_diag(blocks));
}

TEST(Kron, EmptyOperands) {
    EXPECT_EQ(kron(Matrix(0, 3), Matrix::Ones(2, 2)).rows(), 0);
    EXPECT_EQ(kron(Matrix(0, 3), Matrix::Ones(2, 2)).cols(), 6);
}

TEST(Kron, MixedProductAndDistributivity) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> dim(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const Index p = dim(rng), q = dim(rng), r = dim(rng), s = dim(rng), t = dim(rng), u = dim(rng);
        const Matrix A = fixtures::random_matrix(p, q, rng), B = fixtures::random_matrix(r, s, rng);
        const Matrix C = fixtures::random_matrix(q, t, rng), D = fixtures::random_matrix(s, u, rng);
        EXPECT_LE((kron(A, B) * kron(C, D) - kron(Matrix(A * C), Matrix(B * D))).cwiseAbs().maxCoeff(), 1e-10);
        const Matrix A2 = fixtures::random_matrix(p, q, rng);
        EXPECT_LE((kron(Matrix(A + A2), B) - kron(A, B) - kron(A2, B)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Rank, DefaultTolerancePolicy) {
    const Matrix m = (Matrix(3, 3) << 1, 0, 0, 0, 1e-20, 0, 0, 0, 0).finished();
    const RankResult r = rank_with_tolerance(m);
    EXPECT_EQ(r.rank, 1);
    EXPECT_DOUBLE_EQ(r.tolerance_used, 3 * std::numeric_limits<double>::epsilon());
    ASSERT_EQ(r.singular_values.size(), 3u);
    EXPECT_DOUBLE_EQ(r.singular_values[0], 1.0);
}

TEST(Rank, RelativeTolerance) {
    const Matrix m = (Matrix(2, 2) << 1, 0, 0, 1e-6).finished();
    EXPECT_EQ(rank_with_tolerance(m).rank, 2);
    EXPECT_EQ(rank_with_tolerance(m, 1e-5).rank, 1);
    EXPECT_DOUBLE_EQ(rank_with_tolerance(m, 1e-5).tolerance_used, 1e-5);
}

TEST(Rank, EmptyAndZero) {
    EXPECT_EQ(rank_with_tolerance(Matrix(0, 4)).rank, 0);
    EXPECT_EQ(rank_with_tolerance(Matrix(Matrix::Zero(3, 2))).rank, 0);
}

TEST(Rank, ComplexMatrix) {
    CMatrix m(2, 2);
    m << Complex(1, 1), Complex(2, 2), Complex(0, 1), Complex(0, 2);
    EXPECT_EQ(rank_with_tolerance(m).rank, 1);
}

TEST(Kernel, BasisIsOrthonormalAndAnnihilated) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix m = fixtures::random_matrix(2, 5, rng);
        const Matrix k = kernel_basis(m);
        ASSERT_EQ(k.cols(), 3);
        EXPECT_LE((m * k).norm(), 1e-12);
        EXPECT_LE((k.transpose() * k - Matrix::Identity(3, 3)).norm(), 1e-12);
    }
}

TEST(Kernel, TrivialKernel) { EXPECT_EQ(kernel_basis(Matrix(Matrix::Identity(3, 3))).cols(), 0); }

TEST(Eig, PairsAreNormalizedEigenpairs) {
    const Matrix m = (Matrix(3, 3) << 1, 0, 0, 0, 2, 0, 0, -1, 1).finished();
    for (const auto& e : eig(m)) {
        EXPECT_NEAR(e.vector.norm(), 1.0, 1e-12);
        EXPECT_LE((m.cast<Complex>() * e.vector - e.value * e.vector).norm(), 1e-12);
        Index first = 0;
        while (std::abs(e.vector(first)) < 1e-12) ++first;
        EXPECT_GT(e.vector(first).real(), 0.0);
        EXPECT_NEAR(e.vector(first).imag(), 0.0, 1e-15);
    }
}

TEST(Eig, ComplexConjugatePair) {
    const Matrix rot = (Matrix(2, 2) << 0, -1, 1, 0).finished();
    auto ev = eigenvalues(rot);
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_NEAR(std::abs(ev[0].imag()), 1.0, 1e-12);
    EXPECT_NEAR(ev[0].imag(), -ev[1].imag(), 1e-12);
}

// Eigen's real Schur iteration stalls on this grounded Laplacian. It is
// defective, so eigenvalues are only good to about sqrt(eps).
TEST(Eig, RealSchurStallFallsBack) {
    const Matrix m = (Matrix(5, 5) << 2, -1, 0, 0, 0, -1, 2, 0, 0, 0, -1, -1, 3, 0, -1, 0, 0, -1, 2, 0, 0, -1, 0, 0, 2)
                         .finished();
    const auto pairs = eig(m);
    ASSERT_EQ(pairs.size(), 5u);
    std::vector<double> re;
    for (const auto& e : pairs) {
        EXPECT_NEAR(e.value.imag(), 0.0, 1e-7);
        EXPECT_LE((m.cast<Complex>() * e.vector - e.value * e.vector).norm(), 1e-12);
        re.push_back(e.value.real());
    }
    std::sort(re.begin(), re.end());
    const std::vector<double> expected{1, 2, 2, 3, 3};
    for (std::size_t k = 0; k < re.size(); ++k) EXPECT_NEAR(re[k], expected[k], 1e-7);
    EXPECT_EQ(eigenvalues(m).size(), 5u);
}

TEST(Finite, RejectsNaN) {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(require_finite(m, "A"), ValidationError);
    EXPECT_NO_THROW(require_finite(Matrix(Matrix::Ones(2, 2)), "A"));
}

TEST(MaxAbs, EmptyIsZero) { EXPECT_EQ(max_abs(Matrix(0, 0)), 0.0); }
