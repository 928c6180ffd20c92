#include <cmath>

#include "tacds/error.hpp"
#include "tacds/kernels.hpp"
#include "tacds/mamdani_learn.hpp"
#include "tacds/mlp.hpp"

namespace tacds::kernels::serial {

DesignSystem anfis_design(const AnfisModel& model, const RegressionSet& data) {
    DesignSystem sys{Matrix(data.size(), model.consequent_param_count()), data.targets};
    for (std::size_t i = 0; i < data.size(); ++i) {
        AnfisTrace t;
        try {
            t = anfis_forward(model, data.x(i));
        } catch (const DegenerateCoverageError&) {
            throw DegenerateCoverageError(i);
        }
        const Vector row = build_regressor_row(t, data.x(i));
        std::copy(row.begin(), row.end(), sys.a.row(i).begin());
    }
    return sys;
}

LossGradient anfis_premise_gradient(const AnfisModel& model, const RegressionSet& data) {
    LossGradient lg;
    lg.gradient.assign(model.premise_param_count(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        try {
            lg.sse += accumulate_premise_gradient(model, data.x(i), data.y(i), lg.gradient);
        } catch (const DegenerateCoverageError&) {
            throw DegenerateCoverageError(i);
        }
    }
    return lg;
}

double anfis_sse(const AnfisModel& model, const RegressionSet& data) {
    double sse = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double y = 0.0;
        try {
            y = anfis_forward(model, data.x(i)).output;
        } catch (const DegenerateCoverageError&) {
            throw DegenerateCoverageError(i);
        }
        sse += (y - data.y(i)) * (y - data.y(i));
    }
    return sse;
}

LossGradient mlp_loss_gradient(const MlpModel& model, const RegressionSet& data) {
    LossGradient lg;
    lg.gradient.assign(model.weights.size(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) lg.sse += accumulate_mlp_gradient(model, data.x(i), data.y(i), lg.gradient);
    return lg;
}

double mlp_sse(const MlpModel& model, const RegressionSet& data) {
    double sse = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = mlp_forward(model, data.x(i)) - data.y(i);
        sse += r * r;
    }
    return sse;
}

Vector population_rmse(const MamdaniModel& base, std::span<const Vector> population, const RegressionSet& data) {
    Vector out(population.size());
    for (std::size_t p = 0; p < population.size(); ++p) out[p] = mamdani_rmse(decode_centers(base, population[p]), data);
    return out;
}

}  // namespace tacds::kernels::serial
