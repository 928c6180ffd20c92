// tacds: data generation, training, prediction and the comparative benchmark.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "tacds/bench.hpp"
#include "tacds/error.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool parse_on_off(const std::string& v) {
    if (v == "on") return true;
    if (v == "off") return false;
    throw UsageError("--jitter expects 'on' or 'off', got '" + v + "'");
}

tacds::tace::Sample parse_input_list(const std::string& text) {
    std::istringstream in(text);
    double v[4];
    char sep = ',';
    for (int i = 0; i < 4; ++i) {
        if (i > 0 && !(in >> sep && sep == ',')) throw UsageError("--input expects fuel,time,weapon,danger");
        if (!(in >> v[i])) throw UsageError("--input expects fuel,time,weapon,danger");
    }
    if (in >> sep) throw UsageError("--input expects exactly four values");
    return {v[0], v[1], v[2], v[3], 0.0};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soft-computing decision models for tactical air combat scoring"};
    app.require_subcommand(1);

    // generate-data
    auto* gen = app.add_subcommand("generate-data", "Write a synthetic master data set as CSV");
    tacds::bench::GenerateRequest gen_req;
    std::string gen_out;
    std::string gen_jitter = "on";
    gen->add_option("--seed", gen_req.seed, "Random seed")->capture_default_str();
    gen->add_option("--n", gen_req.n, "Number of samples")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_out, "Output CSV path")->required();
    gen->add_option("--jitter", gen_jitter, "Input jitter: on|off")->capture_default_str();
    gen->add_flag("--anchors", gen_req.anchors, "Write the eleven anchor rows instead of samples");

    // train
    auto* train = app.add_subcommand("train", "Train one paradigm; prints the report JSON");
    tacds::bench::TrainRequest train_req;
    std::string train_config;
    std::string train_shape;
    std::size_t train_epochs = 0;
    std::size_t train_hidden = 0;
    train->add_option("--model", train_req.kind, "anfis | mamdani-gd | mamdani-ga | mlp | cart")->required();
    train->add_option("--data", train_req.data_path, "Master CSV")->required();
    train->add_option("--out", train_req.out_path, "Model JSON path (curve goes to <out>.curve.csv)")->required();
    train->add_option("--config", train_config, "Bench config JSON for hyperparameters");
    train->add_option("--shape", train_shape, "ANFIS MF shape: gaussian | gbell | trapezoid | triangle");
    train->add_option("--epochs", train_epochs, "Epochs (generations for mamdani-ga)")->check(CLI::PositiveNumber);
    train->add_option("--seed", train_req.seed, "Split and initialisation seed")->capture_default_str();
    train->add_option("--train-fraction", train_req.train_fraction, "Training share of the data")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    train->add_option("--hidden", train_hidden, "MLP hidden units")->check(CLI::PositiveNumber);

    // predict
    auto* predict = app.add_subcommand("predict", "Score one situation with a saved model");
    std::string predict_model;
    std::string predict_input;
    std::optional<double> fuel, time, weapon, danger;
    predict->add_option("--model", predict_model, "Model JSON path")->required();
    predict->add_option("--input", predict_input, "fuel,time,weapon,danger");
    predict->add_option("--fuel", fuel, "Fuel reserve [0, 1000]");
    predict->add_option("--time", time, "Intercept time [0, 60]");
    predict->add_option("--weapon", weapon, "Weapon efficiency [0, 100]");
    predict->add_option("--danger", danger, "Danger situation [0, 10]");

    // bench
    auto* bench = app.add_subcommand("bench", "Run the full comparative benchmark");
    std::string bench_config;
    std::string bench_out;
    bench->add_option("--config", bench_config, "Bench config JSON (defaults if omitted)");
    bench->add_option("--out", bench_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) {
            gen_req.jitter = parse_on_off(gen_jitter);
            tacds::bench::cmd_generate_data(gen_req, gen_out);
        } else if (*train) {
            if (std::find(tacds::bench::kModelKinds.begin(), tacds::bench::kModelKinds.end(), train_req.kind) ==
                tacds::bench::kModelKinds.end())
                throw UsageError("unknown model kind '" + train_req.kind +
                                 "' (expected anfis, mamdani-gd, mamdani-ga, mlp, cart)");
            if (!train_config.empty()) train_req.config = tacds::bench::load_config(train_config);
            if (!train_shape.empty()) {
                try {
                    train_req.shape = tacds::parse_mf_shape(train_shape);
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
            }
            if (train_epochs) train_req.epochs = train_epochs;
            if (train_hidden) train_req.mlp_hidden = train_hidden;
            std::cout << tacds::bench::cmd_train(train_req).dump(2) << '\n';
        } else if (*predict) {
            tacds::tace::Sample s;
            if (!predict_input.empty()) {
                s = parse_input_list(predict_input);
            } else {
                if (!fuel || !time || !weapon || !danger)
                    throw UsageError("predict needs --input or all of --fuel --time --weapon --danger");
                s = {*fuel, *time, *weapon, *danger, 0.0};
            }
            std::cout << tacds::bench::format_number(tacds::bench::cmd_predict(predict_model, s)) << '\n';
        } else if (*bench) {
            const auto config =
                bench_config.empty() ? tacds::bench::BenchConfig{} : tacds::bench::load_config(bench_config);
            const auto report = tacds::bench::cmd_bench(config, bench_out);
            for (const auto& row : report.summary)
                std::cout << row.paradigm << ' ' << row.dataset << " test_rmse=" << row.test_rmse
                          << (row.best_test ? " (best)" : "") << '\n';
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
