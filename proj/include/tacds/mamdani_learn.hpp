#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tacds/common.hpp"
#include "tacds/fuzzy.hpp"

namespace tacds {

/// Rule extraction from numerical data: each sample votes for the region of
/// maximal membership on every coordinate (ties to the lowest MF index);
/// its degree is the product of those memberships; only the highest-degree
/// rule of each antecedent group survives, with that degree as its weight.
/// Rules come back sorted by antecedent.
MamdaniModel wang_mendel(const RegressionSet& data, std::vector<LinguisticVariable> inputs, LinguisticVariable output);

/// Degree a single (x, y) pair assigns to the rule it generates.
struct CandidateRule {
    MamdaniRule rule;
    double degree = 0.0;
};
CandidateRule wang_mendel_candidate(std::span<const LinguisticVariable> inputs, const LinguisticVariable& output,
                                    std::span<const double> x, double y);

/// All MF centers, inputs first (variable order, then MF order), then the output.
Vector encode_centers(const MamdaniModel& model);
/// Copy of `model` with every MF translated to the given center, clipped to
/// its variable's range.
MamdaniModel decode_centers(const MamdaniModel& model, std::span<const double> genes);
/// (lo, hi) of the variable owning each gene.
std::vector<std::pair<double, double>> center_bounds(const MamdaniModel& model);

double mamdani_rmse(const MamdaniModel& model, const RegressionSet& data);

/// Differentiable stand-in for the centroid used while tuning:
/// Σ a_r·centroid(C_r) / Σ a_r with product activations a_r.
double mamdani_surrogate_output(const MamdaniModel& model, std::span<const double> x);
/// E = ½ Σ (d - y)² of the surrogate and its gradient over encode_centers().
LossGradient mamdani_surrogate_gradient(const MamdaniModel& model, const RegressionSet& data);

struct GdTuneOptions {
    double learning_rate = 0.5;
    double momentum = 0.3;
    std::size_t epochs = 10;
};

/// Batch gradient descent with momentum on all MF centers. The step uses the
/// per-sample mean gradient. rmse_per_epoch holds the full-pipeline training
/// RMSE after each epoch. Throws DivergedError when the surrogate error
/// exceeds 1e6 times its initial value.
std::pair<MamdaniModel, TrainReport> gd_tune(MamdaniModel model, const RegressionSet& data,
                                             const GdTuneOptions& options = {});

struct GaConfig {
    std::size_t population = 50;
    std::size_t generations = 100;
    double mutation_rate = 0.01;
    std::size_t tournament_size = 3;
    std::size_t elite_count = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

struct GaResult {
    MamdaniModel model;
    double initial_best_fitness = 0.0;
    std::vector<double> best_fitness;  // one entry per generation, fitness = -RMSE
    std::vector<Vector> final_population;
};

using Chromosome = Vector;

/// Evolves MF centers from an explicit initial population.
GaResult ga_evolve(const MamdaniModel& model, const RegressionSet& data, std::vector<Chromosome> population,
                   const GaConfig& config);

/// Population seeded from the model: individual 0 carries the current
/// centers, the rest are uniform within each gene's range.
GaResult ga_optimize(const MamdaniModel& model, const RegressionSet& data, const GaConfig& config);

}  // namespace tacds
