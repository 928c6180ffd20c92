#include "tacds/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tacds/error.hpp"

namespace tacds {

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Relative threshold on |R_ii| below which the system counts as rank deficient.
constexpr double kRankTolerance = 1e-10;

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (!std::isfinite(fill)) throw std::invalid_argument("Matrix: non-finite fill value");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw std::invalid_argument("Matrix: data length does not match rows*cols");
    if (!all_finite(data_)) throw std::invalid_argument("Matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t n, double scale) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
    return m;
}

Vector Matrix::multiply(std::span<const double> x) const {
    if (x.size() != cols_) throw std::invalid_argument("Matrix::multiply: dimension mismatch");
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = dot(row(r), x);
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vector lse_batch(const Matrix& a, std::span<const double> y) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (n == 0 || m < n) throw std::invalid_argument("lse_batch: need rows >= cols >= 1");
    if (y.size() != m) throw std::invalid_argument("lse_batch: y length must equal rows");
    if (!all_finite(y)) throw std::invalid_argument("lse_batch: non-finite y");

    // Column-major working copy: Householder reflections act on columns.
    std::vector<double> qr(m * n);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) qr[c * m + r] = a(r, c);
    Vector rhs(y.begin(), y.end());
    Vector diag(n);
    std::vector<std::size_t> perm(n);
    for (std::size_t c = 0; c < n; ++c) perm[c] = c;

    // Householder QR with column pivoting: the largest remaining column goes
    // first, so |R_kk| decreases and a small pivot reveals numerical rank.
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double pivot_norm = -1.0;
        for (std::size_t j = k; j < n; ++j) {
            const double* cj = qr.data() + j * m;
            double sq = 0.0;
            for (std::size_t i = k; i < m; ++i) sq += cj[i] * cj[i];
            if (sq > pivot_norm) {
                pivot_norm = sq;
                pivot = j;
            }
        }
        if (pivot != k) {
            std::swap_ranges(qr.begin() + static_cast<std::ptrdiff_t>(k * m),
                             qr.begin() + static_cast<std::ptrdiff_t>((k + 1) * m),
                             qr.begin() + static_cast<std::ptrdiff_t>(pivot * m));
            std::swap(perm[k], perm[pivot]);
        }

        double* col = qr.data() + k * m;
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm = std::hypot(norm, col[i]);
        if (!(norm > kRankTolerance * std::abs(diag[0])) || norm == 0.0)
            throw SingularSystemError("lse_batch: rank-deficient system");
        if (col[k] > 0.0) norm = -norm;
        for (std::size_t i = k; i < m; ++i) col[i] /= -norm;
        col[k] += 1.0;
        // Apply the reflector to the remaining columns and to the right-hand side.
        for (std::size_t j = k + 1; j < n; ++j) {
            double* cj = qr.data() + j * m;
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += col[i] * cj[i];
            s = -s / col[k];
            for (std::size_t i = k; i < m; ++i) cj[i] += s * col[i];
        }
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += col[i] * rhs[i];
        s = -s / col[k];
        for (std::size_t i = k; i < m; ++i) rhs[i] += s * col[i];
        diag[k] = norm;
    }

    // Back substitution on R z = Qᵀy, then undo the column permutation.
    Vector z(n);
    for (std::size_t kk = n; kk-- > 0;) {
        double s = rhs[kk];
        for (std::size_t j = kk + 1; j < n; ++j) s -= qr[j * m + kk] * z[j];
        z[kk] = s / diag[kk];
    }
    Vector x(n);
    for (std::size_t k = 0; k < n; ++k) x[perm[k]] = z[k];
    return x;
}

RlsState rls_init(std::size_t dim, double gamma) {
    if (dim < 1) throw std::invalid_argument("rls_init: dim must be >= 1");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("rls_init: gamma must be positive");
    return RlsState{Vector(dim, 0.0), Matrix::identity(dim, gamma), gamma};
}

void rls_update_inplace(RlsState& state, std::span<const double> a_row, double y, std::vector<double>& sa) {
    const std::size_t n = state.estimate.size();
    if (a_row.size() != n) throw std::invalid_argument("rls_update: row length must equal state dimension");
    if (!std::isfinite(y) || !all_finite(a_row)) throw std::invalid_argument("rls_update: non-finite input");

    Matrix& s = state.covariance;
    sa.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) sa[i] = dot(s.row(i), a_row);
    const double denom = 1.0 + dot(a_row, sa);
    const double residual = y - dot(a_row, state.estimate);
    for (std::size_t i = 0; i < n; ++i) state.estimate[i] += sa[i] / denom * residual;
    // S is symmetric, so aᵀS = (S a)ᵀ; update the upper triangle and mirror it.
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = sa[i] / denom;
        for (std::size_t j = i; j < n; ++j) {
            const double v = 0.5 * ((s(i, j) - gi * sa[j]) + (s(j, i) - sa[i] * sa[j] / denom));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
}

RlsState rls_update(RlsState state, std::span<const double> a_row, double y) {
    std::vector<double> scratch;
    rls_update_inplace(state, a_row, y, scratch);
    return state;
}

Vector rls_solve(const Matrix& a, std::span<const double> y, double gamma) {
    if (y.size() != a.rows()) throw std::invalid_argument("rls_solve: y length must equal rows");
    RlsState state = rls_init(a.cols(), gamma);
    std::vector<double> scratch;
    for (std::size_t r = 0; r < a.rows(); ++r) rls_update_inplace(state, a.row(r), y[r], scratch);
    return std::move(state.estimate);
}

}  // namespace tacds
