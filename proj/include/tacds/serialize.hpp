#pragma once

#include <string>
#include <variant>

#include "json.hpp"
#include "tacds/anfis.hpp"
#include "tacds/cart.hpp"
#include "tacds/fuzzy.hpp"
#include "tacds/mlp.hpp"

namespace tacds {

using Json = nlohmann::json;

Json to_json(const MembershipFunction& mf);
MembershipFunction mf_from_json(const Json& j);

Json to_json(const LinguisticVariable& v);
LinguisticVariable variable_from_json(const Json& j);

Json to_json(const MamdaniModel& m);
MamdaniModel mamdani_from_json(const Json& j);

Json to_json(const AnfisModel& m);
AnfisModel anfis_from_json(const Json& j);

Json to_json(const MlpModel& m);
MlpModel mlp_from_json(const Json& j);

Json to_json(const RegressionTree& t);
RegressionTree tree_from_json(const Json& j);

/// A trained model of any paradigm, operating on normalized TACE inputs.
class SavedModel {
public:
    using Variant = std::variant<AnfisModel, MamdaniModel, MlpModel, RegressionTree>;

    SavedModel(std::string kind, Variant model) : kind_(std::move(kind)), model_(std::move(model)) {}

    /// Paradigm label: anfis, mamdani-gd, mamdani-ga, mlp or cart.
    const std::string& kind() const noexcept { return kind_; }
    const Variant& model() const noexcept { return model_; }

    double predict_normalized(std::span<const double> x) const;

    Json to_json() const;
    static SavedModel from_json(const Json& j);

private:
    std::string kind_;
    Variant model_;
};

/// Writes {"format": "tacds-model", "version": 1, "kind", "normalization", "model"}.
void save_model(const std::string& path, const SavedModel& model);
SavedModel load_model(const std::string& path);

}  // namespace tacds
