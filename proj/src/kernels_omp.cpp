#include <algorithm>
#include <cmath>
#include <limits>


#include "tacds/error.hpp"
#include "tacds/kernels.hpp"
#include "tacds/mamdani_learn.hpp"
#include "tacds/mlp.hpp"

namespace tacds::kernels::parallel {

namespace {

constexpr std::size_t kNoFailure = std::numeric_limits<std::size_t>::max();

std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

// Runs `per_sample(i, partial)` over fixed sample blocks and sums the block
// partials in block order. `per_sample` returns the squared error.
template <class PerSample>
LossGradient blocked_reduce(std::size_t n, std::size_t width, PerSample&& per_sample) {
    const std::size_t blocks = block_count(n);
    std::vector<Vector> partial(blocks, Vector(width, 0.0));
    std::vector<double> partial_sse(blocks, 0.0);
    std::vector<std::size_t> failure(blocks, kNoFailure);

#pragma omp parallel for schedule(static)
    for (long b = 0; b < static_cast<long>(blocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
        const std::size_t hi = std::min(n, lo + kBlockSize);
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                partial_sse[b] += per_sample(i, partial[b]);
            } catch (const DegenerateCoverageError&) {
                failure[b] = i;
                break;
            }
        }
    }

    for (std::size_t f : failure)
        if (f != kNoFailure) throw DegenerateCoverageError(f);
    LossGradient lg;
    lg.gradient.assign(width, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        lg.sse += partial_sse[b];
        for (std::size_t j = 0; j < width; ++j) lg.gradient[j] += partial[b][j];
    }
    return lg;
}

}  // namespace

DesignSystem anfis_design(const AnfisModel& model, const RegressionSet& data) {
    const std::size_t n = data.size();
    DesignSystem sys{Matrix(n, model.consequent_param_count()), data.targets};
    std::vector<char> failed(n, 0);
#pragma omp parallel for schedule(static)
    for (long li = 0; li < static_cast<long>(n); ++li) {
        const auto i = static_cast<std::size_t>(li);
        try {
            const AnfisTrace t = anfis_forward(model, data.x(i));
            const Vector row = build_regressor_row(t, data.x(i));
            std::copy(row.begin(), row.end(), sys.a.row(i).begin());
        } catch (const DegenerateCoverageError&) {
            failed[i] = 1;
        }
    }
    const auto it = std::find(failed.begin(), failed.end(), 1);
    if (it != failed.end()) throw DegenerateCoverageError(static_cast<std::size_t>(it - failed.begin()));
    return sys;
}

LossGradient anfis_premise_gradient(const AnfisModel& model, const RegressionSet& data) {
    return blocked_reduce(data.size(), model.premise_param_count(), [&](std::size_t i, Vector& g) {
        return accumulate_premise_gradient(model, data.x(i), data.y(i), g);
    });
}

double anfis_sse(const AnfisModel& model, const RegressionSet& data) {
    return blocked_reduce(data.size(), 0, [&](std::size_t i, Vector&) {
               const double r = anfis_forward(model, data.x(i)).output - data.y(i);
               return r * r;
           })
        .sse;
}

LossGradient mlp_loss_gradient(const MlpModel& model, const RegressionSet& data) {
    return blocked_reduce(data.size(), model.weights.size(), [&](std::size_t i, Vector& g) {
        return accumulate_mlp_gradient(model, data.x(i), data.y(i), g);
    });
}

double mlp_sse(const MlpModel& model, const RegressionSet& data) {
    return blocked_reduce(data.size(), 0, [&](std::size_t i, Vector&) {
               const double r = mlp_forward(model, data.x(i)) - data.y(i);
               return r * r;
           })
        .sse;
}

Vector population_rmse(const MamdaniModel& base, std::span<const Vector> population, const RegressionSet& data) {
    Vector out(population.size());
    // Individuals are independent; each is evaluated serially.
#pragma omp parallel for schedule(dynamic)
    for (long p = 0; p < static_cast<long>(population.size()); ++p)
        out[p] = mamdani_rmse(decode_centers(base, population[p]), data);
    return out;
}

}  // namespace tacds::kernels::parallel
