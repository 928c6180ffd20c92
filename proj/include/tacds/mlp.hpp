#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "tacds/common.hpp"

namespace tacds {

/// One hidden tanh layer, identity output.
///
/// Weight layout: for each hidden unit h, its d input weights then its
/// bias; then the H output weights and the output bias.
struct MlpModel {
    std::size_t input_dim = 0;
    std::size_t hidden_units = 0;
    Vector weights;

    static std::size_t weight_count(std::size_t input_dim, std::size_t hidden_units) {
        return (input_dim + 1) * hidden_units + hidden_units + 1;
    }
    /// Uniform in ±1/sqrt(fan-in) per layer, bias included in the fan-in.
    static MlpModel random(std::size_t input_dim, std::size_t hidden_units, std::uint64_t seed);
    static MlpModel zeros(std::size_t input_dim, std::size_t hidden_units);

    void validate() const;
};

double mlp_forward(const MlpModel& model, std::span<const double> x);

/// Adds the sample's contribution to ∂E/∂w, E = ½(y - d)²; returns (y - d)².
double accumulate_mlp_gradient(const MlpModel& model, std::span<const double> x, double target,
                               std::span<double> gradient);

/// Exact gradient of ½ Σ (d - y)² over all weights.
Vector mlp_gradient(const MlpModel& model, const RegressionSet& data);

double mlp_rmse(const MlpModel& model, const RegressionSet& data);

/// Scaled conjugate gradient bookkeeping (Møller's notation).
struct ScgState {
    double sigma0 = 1e-4;
    double lambda = 1e-6;
    double lambda_bar = 0.0;
    Vector direction;
    bool success = true;
    double comparison = 0.0;  // Δ of the last step
    std::size_t successes_since_restart = 0;
};

struct ScgOptions {
    double sigma0 = 1e-4;
    double initial_lambda = 1e-6;
};

/// Each epoch is one SCG iteration on the full-batch gradient; no line
/// search. rmse_per_epoch is the training RMSE after each iteration.
/// Throws DivergedError on a non-finite loss.
std::pair<MlpModel, TrainReport> scg_train(MlpModel model, const RegressionSet& train, const RegressionSet& test,
                                           std::size_t epochs, const ScgOptions& options = {});

}  // namespace tacds
