#include "tacds/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tacds/cart.hpp"
#include "tacds/error.hpp"

namespace tacds::bench {

namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- config

void BenchConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("bench config: ") + what);
    };
    require(samples >= 2, "samples must be >= 2");
    require(!seeds.empty(), "at least one seed");
    require(!datasets.empty(), "at least one dataset");
    for (const auto& d : datasets) {
        require(d.train_fraction > 0.0 && d.train_fraction < 1.0, "train_fraction must be in (0,1)");
        require(d.mlp_hidden >= 1, "mlp_hidden must be >= 1");
        require(!d.name.empty(), "dataset name must be non-empty");
    }
    require(anfis.epochs >= 1 && anfis.mf_count >= 1, "anfis epochs and mf_count must be >= 1");
    require(anfis.initial_step > 0.0 && anfis.rls_gamma > 0.0, "anfis step and gamma must be positive");
    require(mamdani.input_mfs >= 1 && mamdani.output_mfs >= 1, "mamdani MF counts must be >= 1");
    require(mamdani.gd.learning_rate >= 0.0, "mamdani learning_rate must be >= 0");
    mamdani.ga.validate();
    require(mlp.epochs >= 1, "mlp epochs must be >= 1");
    require(cart.min_leaf >= 1 && cart.folds >= 1, "cart min_leaf and folds must be >= 1");
}

namespace {

template <class T>
void read_opt(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<std::string> shape_names(const std::vector<MfShape>& shapes) {
    std::vector<std::string> out;
    for (auto s : shapes) out.emplace_back(to_string(s));
    return out;
}

}  // namespace

BenchConfig BenchConfig::from_json(const Json& j) {
    BenchConfig c;
    try {
        read_opt(j, "data_seed", c.data_seed);
        read_opt(j, "samples", c.samples);
        read_opt(j, "jitter", c.jitter);
        read_opt(j, "seeds", c.seeds);
        if (j.contains("datasets")) {
            c.datasets.clear();
            for (const auto& d : j.at("datasets")) {
                DatasetSpec s;
                s.name = d.at("name").get<std::string>();
                read_opt(d, "train_fraction", s.train_fraction);
                read_opt(d, "mlp_hidden", s.mlp_hidden);
                c.datasets.push_back(std::move(s));
            }
        }
        if (j.contains("anfis")) {
            const auto& a = j.at("anfis");
            read_opt(a, "epochs", c.anfis.epochs);
            read_opt(a, "mf_count", c.anfis.mf_count);
            if (a.contains("shapes")) {
                c.anfis.shapes.clear();
                for (const auto& s : a.at("shapes")) c.anfis.shapes.push_back(parse_mf_shape(s.get<std::string>()));
            }
            if (a.contains("primary_shape")) c.anfis.primary_shape = parse_mf_shape(a.at("primary_shape").get<std::string>());
            read_opt(a, "initial_step", c.anfis.initial_step);
            read_opt(a, "rls_gamma", c.anfis.rls_gamma);
        }
        if (j.contains("mamdani")) {
            const auto& m = j.at("mamdani");
            read_opt(m, "input_mfs", c.mamdani.input_mfs);
            read_opt(m, "output_mfs", c.mamdani.output_mfs);
            read_opt(m, "learning_rate", c.mamdani.gd.learning_rate);
            read_opt(m, "momentum", c.mamdani.gd.momentum);
            read_opt(m, "epochs", c.mamdani.gd.epochs);
            if (m.contains("ga")) {
                const auto& g = m.at("ga");
                read_opt(g, "population", c.mamdani.ga.population);
                read_opt(g, "generations", c.mamdani.ga.generations);
                read_opt(g, "mutation_rate", c.mamdani.ga.mutation_rate);
                read_opt(g, "tournament_size", c.mamdani.ga.tournament_size);
                read_opt(g, "elite_count", c.mamdani.ga.elite_count);
            }
        }
        if (j.contains("mlp")) {
            const auto& m = j.at("mlp");
            read_opt(m, "epochs", c.mlp.epochs);
            read_opt(m, "sigma0", c.mlp.scg.sigma0);
            read_opt(m, "initial_lambda", c.mlp.scg.initial_lambda);
        }
        if (j.contains("cart")) {
            const auto& m = j.at("cart");
            read_opt(m, "min_leaf", c.cart.min_leaf);
            read_opt(m, "folds", c.cart.folds);
        }
    } catch (const Json::exception& e) {
        throw ParseError(std::string("bench config: ") + e.what());
    }
    c.validate();
    return c;
}

Json BenchConfig::to_json() const {
    Json ds = Json::array();
    for (const auto& d : datasets)
        ds.push_back({{"name", d.name}, {"train_fraction", d.train_fraction}, {"mlp_hidden", d.mlp_hidden}});
    return {{"data_seed", data_seed},
            {"samples", samples},
            {"jitter", jitter},
            {"seeds", seeds},
            {"datasets", std::move(ds)},
            {"anfis",
             {{"epochs", anfis.epochs},
              {"mf_count", anfis.mf_count},
              {"shapes", shape_names(anfis.shapes)},
              {"primary_shape", std::string(to_string(anfis.primary_shape))},
              {"initial_step", anfis.initial_step},
              {"rls_gamma", anfis.rls_gamma}}},
            {"mamdani",
             {{"input_mfs", mamdani.input_mfs},
              {"output_mfs", mamdani.output_mfs},
              {"learning_rate", mamdani.gd.learning_rate},
              {"momentum", mamdani.gd.momentum},
              {"epochs", mamdani.gd.epochs},
              {"ga",
               {{"population", mamdani.ga.population},
                {"generations", mamdani.ga.generations},
                {"mutation_rate", mamdani.ga.mutation_rate},
                {"tournament_size", mamdani.ga.tournament_size},
                {"elite_count", mamdani.ga.elite_count}}}}},
            {"mlp", {{"epochs", mlp.epochs}, {"sigma0", mlp.scg.sigma0}, {"initial_lambda", mlp.scg.initial_lambda}}},
            {"cart", {{"min_leaf", cart.min_leaf}, {"folds", cart.folds}}}};
}

BenchConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    try {
        return BenchConfig::from_json(Json::parse(in));
    } catch (const Json::parse_error& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }
}

// ---------------------------------------------------------------- training

namespace {

// Labels in ascending order of the normalized value.
const std::vector<std::vector<std::string>> kInputLabels{
    {"low", "half", "full"},
    {"fast", "normal", "slow"},
    {"insufficient", "enough", "sufficient"},
    {"endanger", "danger", "very_danger"},
};
const std::vector<std::string> kOutputLabels{"bad", "acceptable", "good"};

std::vector<std::string> labels_for(const std::vector<std::string>& base, std::size_t count) {
    return count == base.size() ? base : std::vector<std::string>{};
}

std::vector<LinguisticVariable> tace_inputs(std::size_t count, MfShape shape) {
    std::vector<LinguisticVariable> vars;
    for (std::size_t f = 0; f < tace::kInputCount; ++f)
        vars.push_back(make_uniform_variable(std::string(tace::kFields[f].name), 0.0, 1.0, count, shape,
                                             labels_for(kInputLabels[f], count)));
    return vars;
}

LinguisticVariable tace_output(std::size_t count) {
    return make_uniform_variable("score", 0.0, 1.0, count, MfShape::triangle, labels_for(kOutputLabels, count));
}

// Model-side seed, decorrelated from the split seed.
std::uint64_t model_seed(std::uint64_t seed) { return seed * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL; }

CurveTable epoch_curve(const std::vector<double>& rmse) {
    CurveTable c{{"epoch", "train_rmse"}, {}};
    for (std::size_t e = 0; e < rmse.size(); ++e) c.rows.push_back({static_cast<double>(e + 1), rmse[e]});
    return c;
}

struct MamdaniPipeline {
    MamdaniModel wm;
    MamdaniModel gd;
    TrainReport gd_report;
};

MamdaniPipeline mamdani_base(const RegressionSet& train, const BenchConfig& config, std::optional<std::size_t> epochs) {
    MamdaniModel wm = wang_mendel(train, tace_inputs(config.mamdani.input_mfs, MfShape::triangle),
                                  tace_output(config.mamdani.output_mfs));
    GdTuneOptions gd = config.mamdani.gd;
    if (epochs) gd.epochs = *epochs;
    auto [tuned, report] = gd_tune(wm, train, gd);
    return {std::move(wm), std::move(tuned), std::move(report)};
}

}  // namespace

TrainOutcome train_paradigm(const std::string& kind, const RegressionSet& train, const RegressionSet& test,
                            const BenchConfig& config, const DatasetSpec& dataset, std::uint64_t seed,
                            std::optional<MfShape> anfis_shape, std::optional<std::size_t> epochs) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&](TrainOutcome out) {
        out.report.seed = seed;
        out.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return out;
    };

    if (kind == "anfis") {
        const MfShape shape = anfis_shape.value_or(config.anfis.primary_shape);
        AnfisOptions opt;
        opt.initial_step = config.anfis.initial_step;
        opt.rls_gamma = config.anfis.rls_gamma;
        auto [model, report] = anfis_train(AnfisModel::grid(tace_inputs(config.anfis.mf_count, shape)), train, test,
                                           epochs.value_or(config.anfis.epochs), opt);
        CurveTable curve = epoch_curve(report.rmse_per_epoch);
        Json details{{"shape", std::string(to_string(shape))}, {"rules", model.rule_count()}};
        return finish({SavedModel("anfis", std::move(model)), std::move(report), std::move(curve), std::move(details)});
    }
    if (kind == "mamdani-gd") {
        MamdaniPipeline p = mamdani_base(train, config, epochs);
        TrainReport report = p.gd_report;
        report.final_train_rmse = mamdani_rmse(p.gd, train);
        report.final_test_rmse = test.size() ? mamdani_rmse(p.gd, test) : 0.0;
        Json details{{"rules", p.gd.rules.size()},
                     {"wm_train_rmse", mamdani_rmse(p.wm, train)},
                     {"wm_test_rmse", test.size() ? mamdani_rmse(p.wm, test) : 0.0}};
        CurveTable curve = epoch_curve(report.rmse_per_epoch);
        return finish({SavedModel("mamdani-gd", std::move(p.gd)), std::move(report), std::move(curve), std::move(details)});
    }
    if (kind == "mamdani-ga") {
        MamdaniPipeline p = mamdani_base(train, config, std::nullopt);
        GaConfig ga = config.mamdani.ga;
        ga.seed = model_seed(seed);
        if (epochs) ga.generations = *epochs;
        GaResult r = ga_optimize(p.gd, train, ga);
        TrainReport report;
        for (double f : r.best_fitness) report.rmse_per_epoch.push_back(-f);
        report.final_train_rmse = mamdani_rmse(r.model, train);
        report.final_test_rmse = test.size() ? mamdani_rmse(r.model, test) : 0.0;
        CurveTable curve{{"generation", "best_fitness"}, {}};
        for (std::size_t g = 0; g < r.best_fitness.size(); ++g)
            curve.rows.push_back({static_cast<double>(g + 1), r.best_fitness[g]});
        Json details{{"rules", r.model.rules.size()},
                     {"wm_train_rmse", mamdani_rmse(p.wm, train)},
                     {"wm_test_rmse", test.size() ? mamdani_rmse(p.wm, test) : 0.0},
                     {"gd_train_rmse", mamdani_rmse(p.gd, train)},
                     {"gd_test_rmse", test.size() ? mamdani_rmse(p.gd, test) : 0.0},
                     {"initial_best_fitness", r.initial_best_fitness}};
        return finish({SavedModel("mamdani-ga", std::move(r.model)), std::move(report), std::move(curve), std::move(details)});
    }
    if (kind == "mlp") {
        auto [model, report] = scg_train(MlpModel::random(train.dim(), dataset.mlp_hidden, model_seed(seed)), train,
                                         test, epochs.value_or(config.mlp.epochs), config.mlp.scg);
        CurveTable curve = epoch_curve(report.rmse_per_epoch);
        Json details{{"hidden_units", model.hidden_units}};
        return finish({SavedModel("mlp", std::move(model)), std::move(report), std::move(curve), std::move(details)});
    }
    if (kind == "cart") {
        const RegressionTree full = grow(train, config.cart.min_leaf);
        const PrunedSequence seq =
            prune_sequence(full, train, {config.cart.min_leaf, config.cart.folds, model_seed(seed)});
        RegressionTree tree = select_min_cost(seq);
        TrainReport report;
        report.final_train_rmse = cart_rmse(tree, train);
        report.final_test_rmse = test.size() ? cart_rmse(tree, test) : 0.0;
        const double root_cost = seq.entries.back().cv_cost;
        CurveTable curve{{"terminal_nodes", "alpha", "cv_cost", "relative_error"}, {}};
        for (const auto& e : seq.entries)
            curve.rows.push_back({static_cast<double>(e.terminal_count), e.alpha, e.cv_cost,
                                  root_cost > 0.0 ? e.cv_cost / root_cost : 0.0});
        Json details{{"terminal_count", tree.terminal_count()},
                     {"full_terminal_count", full.terminal_count()},
                     {"depth", tree.depth()}};
        return finish({SavedModel("cart", std::move(tree)), std::move(report), std::move(curve), std::move(details)});
    }
    throw std::invalid_argument("unknown model kind '" + kind + "' (expected anfis, mamdani-gd, mamdani-ga, mlp, cart)");
}

// ---------------------------------------------------------------- files

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string curve_csv(const CurveTable& curve) {
    std::ostringstream out;
    for (std::size_t c = 0; c < curve.columns.size(); ++c) out << (c ? "," : "") << curve.columns[c];
    out << '\n';
    for (const auto& row : curve.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
    }
    return out.str();
}

}  // namespace

double predict_score(const SavedModel& model, const tace::Sample& inputs) {
    tace::Sample probe = inputs;
    probe.score = 0.0;
    tace::check_ranges(probe);
    const auto n = tace::normalize(probe);
    const double x[tace::kInputCount] = {n.fuel, n.intercept_time, n.weapon, n.danger};
    const double y = model.predict_normalized(x);
    return std::clamp(tace::denormalize_field(tace::kInputCount, y), 0.0, 10.0);
}

double cmd_predict(const std::string& model_path, const tace::Sample& inputs) {
    return predict_score(load_model(model_path), inputs);
}

void cmd_generate_data(const GenerateRequest& request, const std::string& out_path) {
    const tace::Dataset ds = request.anchors ? tace::anchors_dataset()
                                             : tace::generate(request.seed, request.n, {request.jitter, 0.02});
    tace::write_csv(out_path, ds);
}

Json cmd_train(const TrainRequest& request) {
    const tace::Dataset master = tace::read_csv(request.data_path);
    if (master.size() < 2) throw std::invalid_argument("train: need at least two samples");
    const auto [train_ds, test_ds] = tace::split(master, request.train_fraction, request.seed);
    const RegressionSet train = tace::to_regression(train_ds);
    const RegressionSet test = tace::to_regression(test_ds);
    const DatasetSpec spec{"custom", request.train_fraction, request.mlp_hidden};
    TrainOutcome out =
        train_paradigm(request.kind, train, test, request.config, spec, request.seed, request.shape, request.epochs);

    save_model(request.out_path, out.model);
    const std::string curve_path = request.out_path + ".curve.csv";
    write_text(curve_path, curve_csv(out.curve));
    Json report{{"kind", request.kind},
            {"seed", request.seed},
            {"train_samples", train.size()},
            {"test_samples", test.size()},
            {"rmse_per_epoch", out.report.rmse_per_epoch},
            {"final_train_rmse", out.report.final_train_rmse},
            {"final_test_rmse", out.report.final_test_rmse},
            {"wall_time", out.report.wall_time},
            {"model_path", request.out_path},
            {"curve_path", curve_path},
            {"details", out.details}};
    for (const auto& [key, value] : out.details.items()) report.emplace(key, value);
    return report;
}

// ---------------------------------------------------------------- bench

const RunRecord* BenchReport::find(const std::string& paradigm, const std::string& dataset, std::uint64_t seed) const {
    for (const auto& r : runs)
        if (r.paradigm == paradigm && r.dataset == dataset && r.seed == seed) return &r;
    return nullptr;
}

const RunRecord* BenchReport::find_sweep(MfShape shape, const std::string& dataset, std::uint64_t seed) const {
    const std::string name = "anfis-" + std::string(to_string(shape));
    for (const auto& r : shape_sweep)
        if (r.paradigm == name && r.dataset == dataset && r.seed == seed) return &r;
    return nullptr;
}

const RunRecord* BenchReport::find_stage(const std::string& stage, const std::string& dataset, std::uint64_t seed) const {
    for (const auto& r : mamdani_stages)
        if (r.paradigm == stage && r.dataset == dataset && r.seed == seed) return &r;
    return nullptr;
}

namespace {

struct BenchContext {
    const BenchConfig& config;
    fs::path out_dir;
};

RunRecord run_one(const BenchContext& ctx, const std::string& kind, const std::string& label, const DatasetSpec& ds,
                  std::uint64_t seed, const RegressionSet& train, const RegressionSet& test,
                  std::optional<MfShape> shape, std::optional<TrainOutcome>* keep = nullptr) {
    RunRecord rec;
    rec.paradigm = label;
    rec.dataset = ds.name;
    rec.seed = seed;
    const std::string stem = label + "_" + ds.name + "_s" + std::to_string(seed);
    try {
        TrainOutcome out = train_paradigm(kind, train, test, ctx.config, ds, seed, shape);
        rec.train_rmse = out.report.final_train_rmse;
        rec.test_rmse = out.report.final_test_rmse;
        rec.wall_time = out.report.wall_time;
        rec.details = out.details;
        rec.model_path = "models/" + stem + ".json";
        save_model((ctx.out_dir / rec.model_path).string(), out.model);
        write_text(ctx.out_dir / "curves" / (stem + ".csv"), curve_csv(out.curve));
        if (keep) keep->emplace(std::move(out));
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs, const std::vector<std::string>& paradigms,
                                  const std::vector<DatasetSpec>& datasets) {
    std::vector<SummaryRow> rows;
    for (const auto& ds : datasets) {
        for (const auto& p : paradigms) {
            SummaryRow row{p, ds.name};
            for (const auto& r : runs) {
                if (r.paradigm != p || r.dataset != ds.name || !r.ok()) continue;
                row.train_rmse += r.train_rmse;
                row.test_rmse += r.test_rmse;
                row.wall_time += r.wall_time;
                ++row.runs_ok;
            }
            if (row.runs_ok) {
                const double n = static_cast<double>(row.runs_ok);
                row.train_rmse /= n;
                row.test_rmse /= n;
                row.wall_time /= n;
            }
            rows.push_back(row);
        }
        SummaryRow* best = nullptr;
        for (auto& r : rows)
            if (r.dataset == ds.name && r.runs_ok && (!best || r.test_rmse < best->test_rmse)) best = &r;
        if (best) best->best_test = true;
    }
    return rows;
}

std::string runs_csv(const std::vector<RunRecord>& runs) {
    std::ostringstream out;
    out << "paradigm,dataset,seed,train_rmse,test_rmse,status,wall_time_s\n";
    for (const auto& r : runs)
        out << r.paradigm << ',' << r.dataset << ',' << r.seed << ',' << format_number(r.train_rmse) << ','
            << format_number(r.test_rmse) << ',' << (r.ok() ? "ok" : "failed") << ',' << format_number(r.wall_time)
            << '\n';
    return out.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "paradigm,dataset,train_rmse,test_rmse,runs_ok,best_test\n";
    for (const auto& r : rows)
        out << r.paradigm << ',' << r.dataset << ',' << format_number(r.train_rmse) << ','
            << format_number(r.test_rmse) << ',' << r.runs_ok << ',' << (r.best_test ? 1 : 0) << '\n';
    return out.str();
}

std::string timing_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "paradigm,dataset,mean_wall_time_s\n";
    for (const auto& r : rows) out << r.paradigm << ',' << r.dataset << ',' << format_number(r.wall_time) << '\n';
    return out.str();
}

Json summary_json(const BenchConfig& config, const std::vector<SummaryRow>& rows,
                  const std::vector<SummaryRow>& sweep, const std::vector<RunRecord>& runs) {
    auto rows_json = [](const std::vector<SummaryRow>& rs) {
        Json a = Json::array();
        for (const auto& r : rs)
            a.push_back({{"paradigm", r.paradigm},
                         {"dataset", r.dataset},
                         {"train_rmse", r.train_rmse},
                         {"test_rmse", r.test_rmse},
                         {"runs_ok", r.runs_ok},
                         {"best_test", r.best_test}});
        return a;
    };
    Json best = Json::object();
    for (const auto& r : rows)
        if (r.best_test) best[r.dataset] = r.paradigm;
    Json failures = Json::array();
    for (const auto& r : runs)
        if (!r.ok()) failures.push_back({{"paradigm", r.paradigm}, {"dataset", r.dataset}, {"seed", r.seed}, {"error", r.error}});
    return {{"config", config.to_json()},
            {"summary", rows_json(rows)},
            {"mf_sweep", rows_json(sweep)},
            {"best_test_by_dataset", std::move(best)},
            {"failures", std::move(failures)}};
}

}  // namespace

BenchReport cmd_bench(const BenchConfig& config, const std::string& out_dir) {
    config.validate();
    const BenchContext ctx{config, fs::path(out_dir)};
    fs::create_directories(ctx.out_dir / "curves");
    fs::create_directories(ctx.out_dir / "models");

    const tace::Dataset master = tace::generate(config.data_seed, config.samples, {config.jitter, 0.02});
    tace::write_csv((ctx.out_dir / "master.csv").string(), master);

    BenchReport report;
    const bool primary_in_sweep =
        std::find(config.anfis.shapes.begin(), config.anfis.shapes.end(), config.anfis.primary_shape) !=
        config.anfis.shapes.end();

    for (const auto& ds : config.datasets) {
        for (std::size_t si = 0; si < config.seeds.size(); ++si) {
            const std::uint64_t seed = config.seeds[si];
            const auto [train_ds, test_ds] = tace::split(master, ds.train_fraction, seed);
            const RegressionSet train = tace::to_regression(train_ds);
            const RegressionSet test = tace::to_regression(test_ds);
            const bool keep_models = si == 0;
            std::vector<std::pair<std::string, std::optional<TrainOutcome>>> kept;

            for (MfShape shape : config.anfis.shapes) {
                const std::string label = "anfis-" + std::string(to_string(shape));
                std::optional<TrainOutcome> out;
                RunRecord rec = run_one(ctx, "anfis", label, ds, seed, train, test, shape, &out);
                report.shape_sweep.push_back(rec);
                if (shape == config.anfis.primary_shape) {
                    rec.paradigm = "anfis";
                    report.runs.push_back(rec);
                    if (keep_models) kept.emplace_back("anfis", std::move(out));
                }
            }
            if (!primary_in_sweep) {
                std::optional<TrainOutcome> out;
                report.runs.push_back(run_one(ctx, "anfis", "anfis", ds, seed, train, test, config.anfis.primary_shape, &out));
                if (keep_models) kept.emplace_back("anfis", std::move(out));
            }

            {
                std::optional<TrainOutcome> out;
                RunRecord rec = run_one(ctx, "mamdani-ga", "mamdani", ds, seed, train, test, std::nullopt, &out);
                report.runs.push_back(rec);
                if (rec.ok()) {
                    const auto& d = rec.details;
                    report.mamdani_stages.push_back({"wm", ds.name, seed, d.at("wm_train_rmse").get<double>(),
                                                     d.at("wm_test_rmse").get<double>(), 0.0, "", "", Json::object()});
                    report.mamdani_stages.push_back({"gd", ds.name, seed, d.at("gd_train_rmse").get<double>(),
                                                     d.at("gd_test_rmse").get<double>(), 0.0, "", "", Json::object()});
                    report.mamdani_stages.push_back({"ga", ds.name, seed, rec.train_rmse, rec.test_rmse, 0.0, "", "",
                                                     Json::object()});
                }
                if (keep_models) kept.emplace_back("mamdani", std::move(out));
            }
            for (const std::string kind : {"mlp", "cart"}) {
                std::optional<TrainOutcome> out;
                report.runs.push_back(run_one(ctx, kind, kind, ds, seed, train, test, std::nullopt, &out));
                if (keep_models) kept.emplace_back(kind, std::move(out));
            }

            if (keep_models) {
                // Test-set predictions of every paradigm, in score points.
                std::ostringstream out;
                out << "index,target";
                for (const auto& [name, o] : kept) out << ',' << name;
                out << '\n';
                for (std::size_t i = 0; i < test.size(); ++i) {
                    out << i << ',' << format_number(tace::denormalize_field(tace::kInputCount, test.y(i)));
                    for (const auto& [name, o] : kept) {
                        out << ',';
                        if (o) out << format_number(tace::denormalize_field(tace::kInputCount, o->model.predict_normalized(test.x(i))));
                    }
                    out << '\n';
                }
                write_text(ctx.out_dir / ("predictions_" + ds.name + ".csv"), out.str());
            }
        }
    }

    std::vector<std::string> sweep_names;
    for (MfShape s : config.anfis.shapes) sweep_names.push_back("anfis-" + std::string(to_string(s)));
    report.summary = summarize(report.runs, kParadigms, config.datasets);
    report.sweep_summary = summarize(report.shape_sweep, sweep_names, config.datasets);

    write_text(ctx.out_dir / "runs.csv", runs_csv(report.runs));
    write_text(ctx.out_dir / "mf_sweep.csv", runs_csv(report.shape_sweep));
    write_text(ctx.out_dir / "mamdani_stages.csv", runs_csv(report.mamdani_stages));
    write_text(ctx.out_dir / "summary.csv", summary_csv(report.summary));
    write_text(ctx.out_dir / "mf_sweep_summary.csv", summary_csv(report.sweep_summary));
    write_text(ctx.out_dir / "timing.csv", timing_csv(report.summary));
    write_text(ctx.out_dir / "summary.json",
               summary_json(config, report.summary, report.sweep_summary, report.runs).dump(2) + "\n");
    return report;
}

}  // namespace tacds::bench
