#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tacds/common.hpp"
#include "tacds/fuzzy.hpp"
#include "tacds/linalg.hpp"

namespace tacds {

/// First-order Takagi-Sugeno network over a grid-partitioned rule base.
///
/// Premise parameters are the MF parameters of `inputs`; consequent
/// parameters are one row per rule of `consequents`, laid out as
/// (p_1, ..., p_d, r) so that rule n outputs p·x + r.
struct AnfisModel {
    std::vector<LinguisticVariable> inputs;
    std::vector<Antecedent> rules;
    Matrix consequents;

    /// Grid-partitioned model with all consequent coefficients zero.
    static AnfisModel grid(std::vector<LinguisticVariable> inputs);

    std::size_t input_count() const noexcept { return inputs.size(); }
    std::size_t rule_count() const noexcept { return rules.size(); }
    std::size_t consequent_param_count() const noexcept { return rules.size() * (inputs.size() + 1); }
    std::size_t premise_param_count() const noexcept;

    Vector premise_params() const;
    /// Writes params back into the MFs and projects them onto valid shapes.
    void set_premise_params(std::span<const double> params);

    Vector consequent_params() const { return consequents.data(); }
    void set_consequent_params(std::span<const double> params);

    void validate() const;
};

/// Intermediate values of one forward pass.
struct AnfisTrace {
    std::vector<double> clipped_x;
    std::vector<double> degrees;      // layer 2, flattened [variable][mf]
    std::vector<std::size_t> offsets;  // start of each variable in `degrees`
    std::vector<double> firing;       // layer 3
    std::vector<double> normalized;   // layer 4
    std::vector<double> rule_outputs; // linear consequent f_n
    std::vector<double> weighted;     // layer 5
    double total_firing = 0.0;
    double output = 0.0;              // layer 6

    double degree(std::size_t variable, std::size_t mf) const { return degrees[offsets[variable] + mf]; }
};

/// Throws DegenerateCoverageError (sample 0) when no rule fires.
AnfisTrace anfis_forward(const AnfisModel& model, std::span<const double> x);

/// (W̄_n·x_1, ..., W̄_n·x_d, W̄_n) for every rule; its dot product with
/// consequent_params() is the forward output.
Vector build_regressor_row(const AnfisTrace& trace, std::span<const double> x);

/// ∂E/∂(premise params) contribution of one sample, E = (y - d)² / 2.
/// Accumulates into `gradient` and returns the squared error.
double accumulate_premise_gradient(const AnfisModel& model, std::span<const double> x, double target,
                                   std::span<double> gradient);

/// Step size k plus the recent epoch errors used by the two adaptation rules.
class StepSizeController {
public:
    explicit StepSizeController(double k = 0.01);

    double k() const noexcept { return k_; }
    const std::vector<double>& history() const noexcept { return history_; }

    friend StepSizeController update_step_size(StepSizeController controller, double new_error);

private:
    double k_;
    std::vector<double> history_;
};

/// Appends an epoch error. Four consecutive reductions grow k by 10%; four
/// consecutive transitions alternating between increase and decrease shrink
/// k by 10%. The window restarts after either rule fires.
StepSizeController update_step_size(StepSizeController controller, double new_error);

/// Learning rate k / ||∂E/∂α||; zero for a zero gradient.
double normalized_learning_rate(double k, std::span<const double> gradient);

enum class ConsequentSolver { batch, recursive };
enum class AnfisMode { hybrid, backprop_only };

struct AnfisOptions {
    AnfisMode mode = AnfisMode::hybrid;
    ConsequentSolver solver = ConsequentSolver::batch;
    double initial_step = 0.01;
    double rls_gamma = kDefaultRlsGamma;
    bool parallel = true;
};

struct EpochResult {
    AnfisModel model;
    double rmse = 0.0;            // after the consequent step, before the premise step
    bool used_recursive = false;  // batch solve was singular (or recursive requested)
};

/// One forward pass (consequents by least squares) and one backward pass
/// (premise steepest descent with rate from the controller).
EpochResult hybrid_epoch(AnfisModel model, const RegressionSet& data, const StepSizeController& controller,
                         const AnfisOptions& options = {});

std::pair<AnfisModel, TrainReport> anfis_train(AnfisModel model, const RegressionSet& train,
                                               const RegressionSet& test, std::size_t epochs,
                                               const AnfisOptions& options = {});

double anfis_predict(const AnfisModel& model, std::span<const double> x);
double anfis_rmse(const AnfisModel& model, const RegressionSet& data);

}  // namespace tacds
