#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tacds {

using Vector = std::vector<double>;

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n, double scale = 1.0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }

    Vector multiply(std::span<const double> x) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Least-squares solution of min ||A x - y||² by column-pivoted Householder
/// QR. A pivot below 1e-10 of the leading pivot counts as rank deficient.
/// Throws SingularSystemError when A is numerically rank deficient and
/// std::invalid_argument on shape mismatch.
Vector lse_batch(const Matrix& a, std::span<const double> y);

/// Running state of the recursive least-squares estimator.
struct RlsState {
    Vector estimate;
    Matrix covariance;
    double gamma = 1e6;
};

inline constexpr double kDefaultRlsGamma = 1e6;

RlsState rls_init(std::size_t dim, double gamma = kDefaultRlsGamma);

/// One recursive least-squares step with observation (a_row, y).
RlsState rls_update(RlsState state, std::span<const double> a_row, double y);

/// In-place variant used by the hot loops; same arithmetic as rls_update.
void rls_update_inplace(RlsState& state, std::span<const double> a_row, double y, std::vector<double>& scratch);

/// Solves A x ≈ y by feeding every row through the recursive estimator.
Vector rls_solve(const Matrix& a, std::span<const double> y, double gamma = kDefaultRlsGamma);

}  // namespace tacds
