#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tacds/linalg.hpp"

namespace tacds {

/// Supervised regression data: one row of `inputs` per target.
struct RegressionSet {
    Matrix inputs;
    Vector targets;

    std::size_t size() const noexcept { return targets.size(); }
    std::size_t dim() const noexcept { return inputs.cols(); }
    std::span<const double> x(std::size_t i) const noexcept { return inputs.row(i); }
    double y(std::size_t i) const noexcept { return targets[i]; }
};

inline RegressionSet make_regression_set(Matrix inputs, Vector targets) {
    if (inputs.rows() != targets.size()) throw std::invalid_argument("regression set: row/target count mismatch");
    return {std::move(inputs), std::move(targets)};
}

/// Per-epoch training curve plus final errors of one training run.
struct TrainReport {
    std::vector<double> rmse_per_epoch;
    double final_train_rmse = 0.0;
    double final_test_rmse = 0.0;
    double wall_time = 0.0;  // seconds
    std::uint64_t seed = 0;
};

inline double rmse_from_sse(double sse, std::size_t count) {
    return count == 0 ? 0.0 : std::sqrt(sse / static_cast<double>(count));
}

/// Sum-of-squares error and its gradient over a parameter vector.
struct LossGradient {
    double sse = 0.0;
    Vector gradient;  // of E = sse / 2
};

}  // namespace tacds
