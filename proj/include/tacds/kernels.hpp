#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tacds/anfis.hpp"
#include "tacds/common.hpp"
#include "tacds/fuzzy.hpp"
#include "tacds/linalg.hpp"

namespace tacds {
struct MlpModel;
}

/// Data-parallel inner loops of the trainers.
///
/// `serial` holds the plain reference loops. `parallel` splits samples into
/// fixed blocks of kBlockSize, runs blocks under OpenMP and reduces block
/// partials in block order, so results are bit-identical for any thread
/// count. The two agree to rounding.
namespace tacds::kernels {

inline constexpr std::size_t kBlockSize = 64;

/// Rows of the consequent least-squares system A X = Y.
struct DesignSystem {
    Matrix a;
    Vector y;
};

namespace serial {

DesignSystem anfis_design(const AnfisModel& model, const RegressionSet& data);
LossGradient anfis_premise_gradient(const AnfisModel& model, const RegressionSet& data);
double anfis_sse(const AnfisModel& model, const RegressionSet& data);
LossGradient mlp_loss_gradient(const MlpModel& model, const RegressionSet& data);
double mlp_sse(const MlpModel& model, const RegressionSet& data);
/// Full-pipeline RMSE of `base` with its MF centers replaced by each chromosome.
Vector population_rmse(const MamdaniModel& base, std::span<const Vector> population, const RegressionSet& data);

}  // namespace serial

namespace parallel {

DesignSystem anfis_design(const AnfisModel& model, const RegressionSet& data);
LossGradient anfis_premise_gradient(const AnfisModel& model, const RegressionSet& data);
double anfis_sse(const AnfisModel& model, const RegressionSet& data);
LossGradient mlp_loss_gradient(const MlpModel& model, const RegressionSet& data);
double mlp_sse(const MlpModel& model, const RegressionSet& data);
Vector population_rmse(const MamdaniModel& base, std::span<const Vector> population, const RegressionSet& data);

}  // namespace parallel

}  // namespace tacds::kernels
