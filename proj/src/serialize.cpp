#include "tacds/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include "tacds/error.hpp"
#include "tacds/tace.hpp"

namespace tacds {

Json to_json(const MembershipFunction& mf) {
    return {{"shape", std::string(to_string(mf.shape()))},
            {"params", std::vector<double>(mf.params().begin(), mf.params().end())}};
}

MembershipFunction mf_from_json(const Json& j) {
    const auto params = j.at("params").get<std::vector<double>>();
    return MembershipFunction::make(parse_mf_shape(j.at("shape").get<std::string>()), params);
}

Json to_json(const LinguisticVariable& v) {
    Json mfs = Json::array();
    for (const auto& m : v.mfs()) {
        Json e = to_json(m.mf);
        e["label"] = m.label;
        mfs.push_back(std::move(e));
    }
    return {{"name", v.name()}, {"range", {v.lo(), v.hi()}}, {"mfs", std::move(mfs)}};
}

LinguisticVariable variable_from_json(const Json& j) {
    const auto range = j.at("range").get<std::vector<double>>();
    if (range.size() != 2) throw ParseError("variable range must have two entries");
    std::vector<LabeledMf> mfs;
    for (const auto& e : j.at("mfs")) mfs.push_back({e.value("label", std::string()), mf_from_json(e)});
    return LinguisticVariable(j.at("name").get<std::string>(), range[0], range[1], std::move(mfs));
}

Json to_json(const MamdaniModel& m) {
    Json inputs = Json::array();
    for (const auto& v : m.inputs) inputs.push_back(to_json(v));
    Json rules = Json::array();
    for (const auto& r : m.rules)
        rules.push_back({{"antecedent", r.antecedent}, {"consequent", r.consequent}, {"weight", r.weight}});
    return {{"inputs", std::move(inputs)},
            {"output", to_json(m.output)},
            {"rules", std::move(rules)},
            {"inference",
             {{"tnorm", "product"}, {"implication", "product"}, {"aggregation", "max"}, {"defuzzification", "centroid"},
              {"resolution", MamdaniOptions{}.resolution}}}};
}

MamdaniModel mamdani_from_json(const Json& j) {
    std::vector<LinguisticVariable> inputs;
    for (const auto& v : j.at("inputs")) inputs.push_back(variable_from_json(v));
    MamdaniModel m{std::move(inputs), variable_from_json(j.at("output")), {}};
    for (const auto& r : j.at("rules"))
        m.rules.push_back({r.at("antecedent").get<Antecedent>(), r.at("consequent").get<std::size_t>(),
                           r.at("weight").get<double>()});
    m.validate();
    return m;
}

Json to_json(const AnfisModel& m) {
    Json inputs = Json::array();
    for (const auto& v : m.inputs) inputs.push_back(to_json(v));
    Json consequents = Json::array();
    for (std::size_t r = 0; r < m.consequents.rows(); ++r) {
        const auto row = m.consequents.row(r);
        consequents.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"inputs", std::move(inputs)}, {"rules", m.rules}, {"consequents", std::move(consequents)}};
}

AnfisModel anfis_from_json(const Json& j) {
    AnfisModel m;
    for (const auto& v : j.at("inputs")) m.inputs.push_back(variable_from_json(v));
    m.rules = j.at("rules").get<std::vector<Antecedent>>();
    const auto rows = j.at("consequents").get<std::vector<std::vector<double>>>();
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != m.inputs.size() + 1) throw ParseError("anfis consequent row has wrong length");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    m.consequents = Matrix(rows.size(), m.inputs.size() + 1, std::move(flat));
    m.validate();
    return m;
}

Json to_json(const MlpModel& m) {
    return {{"input_dim", m.input_dim},
            {"hidden_units", m.hidden_units},
            {"hidden_activation", "tanh"},
            {"output_activation", "identity"},
            {"weights", m.weights}};
}

MlpModel mlp_from_json(const Json& j) {
    MlpModel m{j.at("input_dim").get<std::size_t>(), j.at("hidden_units").get<std::size_t>(),
               j.at("weights").get<std::vector<double>>()};
    m.validate();
    return m;
}

namespace {

Json node_to_json(const std::vector<TreeNode>& nodes, std::size_t i) {
    const auto& n = nodes[i];
    Json j{{"prediction", n.prediction}, {"samples", n.sample_count}, {"sse", n.sse}};
    if (n.leaf) {
        j["leaf"] = true;
    } else {
        j["leaf"] = false;
        j["variable"] = n.variable;
        j["threshold"] = n.threshold;
        j["left"] = node_to_json(nodes, n.left);
        j["right"] = node_to_json(nodes, n.right);
    }
    return j;
}

std::size_t node_from_json(const Json& j, std::vector<TreeNode>& nodes) {
    const std::size_t id = nodes.size();
    TreeNode n;
    n.prediction = j.at("prediction").get<double>();
    n.sample_count = j.at("samples").get<std::size_t>();
    n.sse = j.at("sse").get<double>();
    n.leaf = j.at("leaf").get<bool>();
    nodes.push_back(n);
    if (!n.leaf) {
        nodes[id].variable = j.at("variable").get<std::size_t>();
        nodes[id].threshold = j.at("threshold").get<double>();
        const std::size_t l = node_from_json(j.at("left"), nodes);
        const std::size_t r = node_from_json(j.at("right"), nodes);
        nodes[id].left = l;
        nodes[id].right = r;
    }
    return id;
}

}  // namespace

Json to_json(const RegressionTree& t) { return node_to_json(t.nodes(), 0); }

RegressionTree tree_from_json(const Json& j) {
    std::vector<TreeNode> nodes;
    node_from_json(j, nodes);
    return RegressionTree(std::move(nodes));
}

double SavedModel::predict_normalized(std::span<const double> x) const {
    struct Visitor {
        std::span<const double> x;
        double operator()(const AnfisModel& m) const { return anfis_predict(m, x); }
        double operator()(const MamdaniModel& m) const { return mamdani_infer(m, x).value; }
        double operator()(const MlpModel& m) const { return mlp_forward(m, x); }
        double operator()(const RegressionTree& t) const { return t.predict(x); }
    };
    return std::visit(Visitor{x}, model_);
}

Json SavedModel::to_json() const {
    Json inputs = Json::array();
    for (std::size_t f = 0; f < tace::kInputCount; ++f)
        inputs.push_back({{"name", tace::kFields[f].name}, {"lo", tace::kFields[f].lo}, {"hi", tace::kFields[f].hi}});
    const auto& target = tace::kFields[tace::kInputCount];
    Json body = std::visit([](const auto& m) { return tacds::to_json(m); }, model_);
    return {{"format", "tacds-model"},
            {"version", 1},
            {"kind", kind_},
            {"normalization", {{"inputs", std::move(inputs)}, {"target", {{"name", target.name}, {"lo", target.lo}, {"hi", target.hi}}}}},
            {"model", std::move(body)}};
}

SavedModel SavedModel::from_json(const Json& j) {
    try {
        if (j.at("format").get<std::string>() != "tacds-model") throw ParseError("not a tacds model file");
        const auto kind = j.at("kind").get<std::string>();
        const Json& body = j.at("model");
        if (kind == "anfis") return SavedModel(kind, anfis_from_json(body));
        if (kind == "mamdani" || kind == "mamdani-gd" || kind == "mamdani-ga" || kind == "mamdani-wm")
            return SavedModel(kind, mamdani_from_json(body));
        if (kind == "mlp") return SavedModel(kind, mlp_from_json(body));
        if (kind == "cart") return SavedModel(kind, tree_from_json(body));
        throw ParseError("unknown model kind '" + kind + "'");
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed model JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid model: ") + e.what());
    }
}

void save_model(const std::string& path, const SavedModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << model.to_json().dump(1) << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

SavedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    return SavedModel::from_json(j);
}

}  // namespace tacds
