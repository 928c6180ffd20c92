#include <gtest/gtest.h>

#include <cmath>

#include "tacds/error.hpp"
#include "tacds/linalg.hpp"
#include "test_util.hpp"

using namespace tacds;
using tacds::testing::random_matrix;

namespace {

// Solves (AᵀA) x = Aᵀy with Gaussian elimination and partial pivoting.
Vector normal_equations(const Matrix& a, const Vector& y) {
    const std::size_t n = a.cols();
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t r = 0; r < a.rows(); ++r) m[i][j] += a(r, i) * a(r, j);
        for (std::size_t r = 0; r < a.rows(); ++r) m[i][n] += a(r, i) * y[r];
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m[i][k]) > std::abs(m[p][k])) p = i;
        std::swap(m[k], m[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m[i][k] / m[k][k];
            for (std::size_t j = k; j <= n; ++j) m[i][j] -= f * m[k][j];
        }
    }
    Vector x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = m[k][n];
        for (std::size_t j = k + 1; j < n; ++j) s -= m[k][j] * x[j];
        x[k] = s / m[k][k];
    }
    return x;
}

double residual_sq(const Matrix& a, const Vector& x, const Vector& y) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double e = dot(a.row(r), x) - y[r];
        s += e * e;
    }
    return s;
}

double max_abs_diff(const Vector& a, const Vector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST(Matrix, RejectsMismatchedOrNonFiniteData) {
    EXPECT_THROW(Matrix(2, 2, Vector{1, 2, 3}), std::invalid_argument);
    EXPECT_THROW(Matrix(1, 2, Vector{1, std::nan("")}), std::invalid_argument);
    const Matrix m(2, 2, Vector{1, 2, 3, 4});
    EXPECT_EQ(m.multiply(Vector{1, 1}), (Vector{3, 7}));
}

TEST(LseBatch, IdentitySystem) {
    const Vector x = lse_batch(Matrix::identity(3), Vector{1, 2, 3});
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(x[i], i + 1.0, 1e-15);
}

TEST(LseBatch, DiagonalSystem) {
    const Matrix a(2, 2, Vector{1, 0, 0, 2});
    const Vector x = lse_batch(a, Vector{2, 6});
    EXPECT_NEAR(x[0], 2.0, 1e-15);
    EXPECT_NEAR(x[1], 3.0, 1e-15);
}

TEST(LseBatch, MatchesNormalEquations) {
    Rng rng(20);
    const Matrix a = random_matrix(rng, 20, 5);
    Vector y(20);
    for (double& v : y) v = rng.uniform(-2.0, 2.0);
    EXPECT_LT(max_abs_diff(lse_batch(a, y), normal_equations(a, y)), 1e-10);
}

TEST(LseBatch, NoPerturbationLowersResidual) {
    Rng rng(7);
    const Matrix a = random_matrix(rng, 40, 6);
    Vector y(40);
    for (double& v : y) v = rng.normal();
    const Vector x = lse_batch(a, y);
    const double best = residual_sq(a, x, y);
    for (int t = 0; t < 100; ++t) {
        Vector p = x;
        for (double& v : p) v += 1e-3 * rng.normal();
        EXPECT_GE(residual_sq(a, p, y), best);
    }
}

TEST(LseBatch, RankDeficientSystemThrows) {
    Matrix a(4, 2);
    for (std::size_t r = 0; r < 4; ++r) {
        a(r, 0) = r + 1.0;
        a(r, 1) = 2.0 * (r + 1.0);
    }
    EXPECT_THROW(lse_batch(a, Vector{1, 2, 3, 4}), SingularSystemError);
}

TEST(LseBatch, NearlyCollinearColumnsAreRankDeficient) {
    // Third column equals the sum of the first two up to 1e-13.
    Rng rng(3);
    Matrix a = random_matrix(rng, 30, 3);
    for (std::size_t r = 0; r < 30; ++r) a(r, 2) = a(r, 0) + a(r, 1) + 1e-13 * rng.normal();
    EXPECT_THROW(lse_batch(a, Vector(30, 1.0)), SingularSystemError);
}

TEST(LseBatch, ShapeErrors) {
    EXPECT_THROW(lse_batch(Matrix(2, 3), Vector{1, 2}), std::invalid_argument);
    EXPECT_THROW(lse_batch(Matrix::identity(2), Vector{1}), std::invalid_argument);
}

TEST(Rls, InitialState) {
    const RlsState s = rls_init(2, 1e6);
    EXPECT_EQ(s.estimate, (Vector{0, 0}));
    EXPECT_EQ(s.covariance(0, 0), 1e6);
    EXPECT_EQ(s.covariance(1, 1), 1e6);
    EXPECT_EQ(s.covariance(0, 1), 0.0);

    const RlsState one = rls_init(1, 1.0);
    EXPECT_EQ(one.estimate, Vector{0.0});
    EXPECT_EQ(one.covariance(0, 0), 1.0);

    const RlsState big = rls_init(405);
    EXPECT_EQ(big.estimate, Vector(405, 0.0));
    EXPECT_EQ(big.gamma, 1e6);
    EXPECT_THROW(rls_init(0), std::invalid_argument);
    EXPECT_THROW(rls_init(2, 0.0), std::invalid_argument);
}

TEST(Rls, OneStepClosedForm) {
    const double gamma = 1e6;
    const RlsState s = rls_update(rls_init(1, gamma), Vector{1.0}, 2.0);
    EXPECT_NEAR(s.estimate[0], 2.0 * gamma / (1.0 + gamma), 1e-12);
    // P - P a a^T P / (1 + a^T P a) cancels about log10(gamma) digits.
    EXPECT_NEAR(s.covariance(0, 0), gamma / (1.0 + gamma), 1e-9);
}

TEST(Rls, MatchesBatchOnFullRankSystem) {
    Rng rng(30);
    const Matrix a = random_matrix(rng, 30, 6);
    Vector y(30);
    for (double& v : y) v = rng.uniform(-1.0, 1.0);
    EXPECT_LT(max_abs_diff(rls_solve(a, y, 1e8), lse_batch(a, y)), 1e-8);
}

TEST(Rls, ConsistentRepeatLeavesEstimate) {
    Rng rng(5);
    RlsState s = rls_init(3, 1e8);
    for (int i = 0; i < 5; ++i) {
        const Vector row{rng.uniform(), rng.uniform(), rng.uniform()};
        s = rls_update(s, row, 1.0 * row[0] - 2.0 * row[1] + 0.5 * row[2]);
    }
    const Vector row{0.3, 0.6, 0.9};
    const double y = dot(row, s.estimate);
    const RlsState again = rls_update(s, row, y);
    EXPECT_LT(max_abs_diff(again.estimate, s.estimate), 1e-9);
}

TEST(Rls, CovarianceStaysSymmetricPositiveDefinite) {
    Rng rng(11);
    RlsState s = rls_init(6, 1e6);
    for (int i = 0; i < 60; ++i) {
        Vector row(6);
        for (double& v : row) v = rng.normal();
        s = rls_update(s, row, rng.normal());
        double scale = 0.0, asym = 0.0;
        for (std::size_t r = 0; r < 6; ++r)
            for (std::size_t c = 0; c < 6; ++c) {
                scale = std::max(scale, std::abs(s.covariance(r, c)));
                asym = std::max(asym, std::abs(s.covariance(r, c) - s.covariance(c, r)));
            }
        EXPECT_LE(asym, 1e-9 * scale);
        // Cholesky pivots.
        Matrix l(6, 6);
        for (std::size_t j = 0; j < 6; ++j) {
            double d = s.covariance(j, j);
            for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
            ASSERT_GT(d, 0.0);
            l(j, j) = std::sqrt(d);
            for (std::size_t r = j + 1; r < 6; ++r) {
                double v = s.covariance(r, j);
                for (std::size_t k = 0; k < j; ++k) v -= l(r, k) * l(j, k);
                l(r, j) = v / l(j, j);
            }
        }
    }
}

TEST(Rls, SequentialAgreesWithBatchAcrossSeeds) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Rng rng(seed);
        const std::size_t cols = 1 + rng.index(10);
        const std::size_t rows = cols + 5 + rng.index(50 - cols - 4);
        const Matrix a = random_matrix(rng, rows, cols);
        Vector y(rows);
        for (double& v : y) v = rng.normal();
        RlsState s = rls_init(cols, 1e8);
        for (std::size_t r = 0; r < rows; ++r) s = rls_update(s, a.row(r), y[r]);
        EXPECT_LT(max_abs_diff(s.estimate, lse_batch(a, y)), 1e-6) << "seed " << seed;
    }
}

TEST(Rls, RejectsBadInput) {
    RlsState s = rls_init(2);
    EXPECT_THROW(rls_update(s, Vector{1.0}, 1.0), std::invalid_argument);
    EXPECT_THROW(rls_update(s, Vector{1.0, 2.0}, std::nan("")), std::invalid_argument);
}
