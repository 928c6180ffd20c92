#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tacds/anfis.hpp"
#include "tacds/mamdani_learn.hpp"
#include "tacds/mlp.hpp"
#include "tacds/serialize.hpp"
#include "tacds/tace.hpp"

namespace tacds::bench {

struct DatasetSpec {
    std::string name;
    double train_fraction = 0.9;
    std::size_t mlp_hidden = 30;
};

struct AnfisSettings {
    std::size_t epochs = 15;
    std::size_t mf_count = 3;
    std::vector<MfShape> shapes{MfShape::gaussian, MfShape::gbell, MfShape::trapezoid, MfShape::triangle};
    MfShape primary_shape = MfShape::gaussian;
    double initial_step = 0.01;
    double rls_gamma = kDefaultRlsGamma;
};

struct MamdaniSettings {
    std::size_t input_mfs = 3;
    std::size_t output_mfs = 3;
    GdTuneOptions gd{};
    GaConfig ga{};
};

struct MlpSettings {
    std::size_t epochs = 1000;
    ScgOptions scg{};
};

struct CartSettings {
    std::size_t min_leaf = 5;
    std::size_t folds = 10;
};

/// Experiment protocol. Every field has a default; a JSON config only needs
/// the keys it overrides.
struct BenchConfig {
    std::uint64_t data_seed = 2024;
    std::size_t samples = 1000;
    bool jitter = true;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<DatasetSpec> datasets{{"A", 0.9, 30}, {"B", 0.8, 32}};
    AnfisSettings anfis{};
    MamdaniSettings mamdani{};
    MlpSettings mlp{};
    CartSettings cart{};

    void validate() const;
    static BenchConfig from_json(const Json& j);
    Json to_json() const;
};

BenchConfig load_config(const std::string& path);

/// Paradigm labels accepted by train_paradigm.
inline const std::vector<std::string> kModelKinds{"anfis", "mamdani-gd", "mamdani-ga", "mlp", "cart"};

struct CurveTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct TrainOutcome {
    SavedModel model;
    TrainReport report;
    CurveTable curve;
    Json details = Json::object();
};

/// Trains one paradigm on normalized data. `anfis_shape` overrides the
/// configured primary shape; `epochs` overrides the paradigm's epoch or
/// generation count.
TrainOutcome train_paradigm(const std::string& kind, const RegressionSet& train, const RegressionSet& test,
                            const BenchConfig& config, const DatasetSpec& dataset, std::uint64_t seed,
                            std::optional<MfShape> anfis_shape = std::nullopt,
                            std::optional<std::size_t> epochs = std::nullopt);

struct RunRecord {
    std::string paradigm;
    std::string dataset;
    std::uint64_t seed = 0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    double wall_time = 0.0;
    std::string model_path;
    std::string error;  // empty on success
    Json details = Json::object();

    bool ok() const noexcept { return error.empty(); }
};

struct SummaryRow {
    std::string paradigm;
    std::string dataset;
    double train_rmse = 0.0;  // mean over successful seeds
    double test_rmse = 0.0;
    double wall_time = 0.0;
    std::size_t runs_ok = 0;
    bool best_test = false;
};

struct BenchReport {
    std::vector<RunRecord> runs;         // anfis (primary shape), mamdani, mlp, cart
    std::vector<RunRecord> shape_sweep;  // paradigm field holds "anfis-<shape>"
    std::vector<RunRecord> mamdani_stages;  // "wm", "gd", "ga"
    std::vector<SummaryRow> summary;
    std::vector<SummaryRow> sweep_summary;

    const RunRecord* find(const std::string& paradigm, const std::string& dataset, std::uint64_t seed) const;
    const RunRecord* find_sweep(MfShape shape, const std::string& dataset, std::uint64_t seed) const;
    const RunRecord* find_stage(const std::string& stage, const std::string& dataset, std::uint64_t seed) const;
};

inline const std::vector<std::string> kParadigms{"anfis", "mamdani", "mlp", "cart"};

/// Runs paradigm × dataset × seed plus the ANFIS MF-shape sweep and writes
/// summary.csv, summary.json, runs.csv, mf_sweep.csv, mf_sweep_summary.csv,
/// mamdani_stages.csv, timing.csv, predictions_<dataset>.csv, curves/ and
/// models/ under out_dir. Failed sub-runs are recorded and skipped.
BenchReport cmd_bench(const BenchConfig& config, const std::string& out_dir);

struct GenerateRequest {
    std::uint64_t seed = 1;
    std::size_t n = 1000;
    bool jitter = true;
    bool anchors = false;  // emit the anchor table instead of samples
};

void cmd_generate_data(const GenerateRequest& request, const std::string& out_path);

struct TrainRequest {
    std::string kind;
    std::string data_path;
    std::string out_path;
    BenchConfig config{};
    std::optional<MfShape> shape;
    std::optional<std::size_t> epochs;
    std::uint64_t seed = 1;
    double train_fraction = 0.9;
    std::size_t mlp_hidden = 30;
};

/// Trains on a CSV master set split by train_fraction, writes the model JSON
/// to out_path and its curve to out_path + ".curve.csv", and returns the
/// report JSON.
Json cmd_train(const TrainRequest& request);

/// Score in [0, 10] for physical inputs; RangeError when an input is out
/// of its declared range.
double cmd_predict(const std::string& model_path, const tace::Sample& inputs);
double predict_score(const SavedModel& model, const tace::Sample& inputs);

/// Shortest round-trip decimal text of a double.
std::string format_number(double v);

}  // namespace tacds::bench
