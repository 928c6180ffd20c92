#include "tacds/anfis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "tacds/error.hpp"
#include "tacds/kernels.hpp"

namespace tacds {

namespace {

// Widths never shrink below this fraction of the variable range.
constexpr double kMinWidthFraction = 1e-6;

}  // namespace

AnfisModel AnfisModel::grid(std::vector<LinguisticVariable> inputs) {
    AnfisModel m;
    m.rules = grid_partition(inputs);
    m.consequents = Matrix(m.rules.size(), inputs.size() + 1);
    m.inputs = std::move(inputs);
    return m;
}

std::size_t AnfisModel::premise_param_count() const noexcept {
    std::size_t n = 0;
    for (const auto& v : inputs)
        for (const auto& m : v.mfs()) n += m.mf.param_count();
    return n;
}

Vector AnfisModel::premise_params() const {
    Vector out;
    out.reserve(premise_param_count());
    for (const auto& v : inputs)
        for (const auto& m : v.mfs())
            for (double p : m.mf.params()) out.push_back(p);
    return out;
}

void AnfisModel::set_premise_params(std::span<const double> params) {
    if (params.size() != premise_param_count()) throw std::invalid_argument("set_premise_params: length mismatch");
    std::size_t pos = 0;
    for (auto& v : inputs) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& old = v[i].mf;
            const std::size_t n = old.param_count();
            auto mf = MembershipFunction::make_projected(old.shape(), params.subspan(pos, n), kMinWidthFraction * v.width());
            v.set_mf(i, mf);
            pos += n;
        }
    }
}

void AnfisModel::set_consequent_params(std::span<const double> params) {
    if (params.size() != consequent_param_count())
        throw std::invalid_argument("set_consequent_params: length mismatch");
    consequents = Matrix(rules.size(), inputs.size() + 1, std::vector<double>(params.begin(), params.end()));
}

void AnfisModel::validate() const {
    if (inputs.empty()) throw std::invalid_argument("anfis: no inputs");
    if (consequents.rows() != rules.size() || consequents.cols() != inputs.size() + 1)
        throw std::invalid_argument("anfis: consequent shape must be rules x (inputs + 1)");
    for (const auto& r : rules) {
        if (r.size() != inputs.size()) throw std::invalid_argument("anfis: rule arity mismatch");
        for (std::size_t v = 0; v < r.size(); ++v)
            if (r[v] >= inputs[v].size()) throw std::invalid_argument("anfis: rule MF index out of range");
    }
}

AnfisTrace anfis_forward(const AnfisModel& model, std::span<const double> x) {
    const std::size_t d = model.input_count();
    if (x.size() != d) throw std::invalid_argument("anfis_forward: input arity mismatch");
    AnfisTrace t;
    t.clipped_x.resize(d);
    t.offsets.resize(d);
    std::size_t total_mfs = 0;
    for (std::size_t v = 0; v < d; ++v) {
        t.offsets[v] = total_mfs;
        total_mfs += model.inputs[v].size();
    }
    t.degrees.resize(total_mfs);
    for (std::size_t v = 0; v < d; ++v) {
        const auto& var = model.inputs[v];
        t.clipped_x[v] = var.clip(x[v]);
        for (std::size_t m = 0; m < var.size(); ++m) t.degrees[t.offsets[v] + m] = var[m].mf.eval(t.clipped_x[v]);
    }

    const std::size_t n_rules = model.rule_count();
    t.firing.resize(n_rules);
    for (std::size_t n = 0; n < n_rules; ++n) {
        double w = 1.0;
        for (std::size_t v = 0; v < d; ++v) w *= t.degrees[t.offsets[v] + model.rules[n][v]];
        t.firing[n] = w;
        t.total_firing += w;
    }
    if (!(t.total_firing > 0.0)) throw DegenerateCoverageError(0);

    t.normalized.resize(n_rules);
    t.rule_outputs.resize(n_rules);
    t.weighted.resize(n_rules);
    for (std::size_t n = 0; n < n_rules; ++n) {
        t.normalized[n] = t.firing[n] / t.total_firing;
        const auto c = model.consequents.row(n);
        double f = c[d];
        for (std::size_t v = 0; v < d; ++v) f += c[v] * x[v];
        t.rule_outputs[n] = f;
        t.weighted[n] = t.normalized[n] * f;
        t.output += t.weighted[n];
    }
    return t;
}

Vector build_regressor_row(const AnfisTrace& trace, std::span<const double> x) {
    const std::size_t d = x.size();
    const std::size_t n_rules = trace.normalized.size();
    Vector row(n_rules * (d + 1));
    for (std::size_t n = 0; n < n_rules; ++n) {
        const double wn = trace.normalized[n];
        double* r = row.data() + n * (d + 1);
        for (std::size_t v = 0; v < d; ++v) r[v] = wn * x[v];
        r[d] = wn;
    }
    return row;
}

double accumulate_premise_gradient(const AnfisModel& model, std::span<const double> x, double target,
                                   std::span<double> gradient) {
    const AnfisTrace t = anfis_forward(model, x);
    const std::size_t d = model.input_count();
    const double err = t.output - target;

    // ∂E/∂μ for every (variable, mf) through layers 6 → 3.
    std::vector<double> d_degree(t.degrees.size(), 0.0);
    for (std::size_t n = 0; n < model.rule_count(); ++n) {
        const double d_firing = err * (t.rule_outputs[n] - t.output) / t.total_firing;
        if (d_firing == 0.0) continue;
        const auto& rule = model.rules[n];
        for (std::size_t v = 0; v < d; ++v) {
            double others = 1.0;
            for (std::size_t u = 0; u < d; ++u)
                if (u != v) others *= t.degrees[t.offsets[u] + rule[u]];
            d_degree[t.offsets[v] + rule[v]] += d_firing * others;
        }
    }

    // Layer 2: chain through the MF parameter derivatives.
    std::size_t pos = 0;
    for (std::size_t v = 0; v < d; ++v) {
        const auto& var = model.inputs[v];
        for (std::size_t m = 0; m < var.size(); ++m) {
            const auto& mf = var[m].mf;
            const double dd = d_degree[t.offsets[v] + m];
            const MfGradient g = mf.grad(t.clipped_x[v]);
            for (std::size_t p = 0; p < g.size; ++p) gradient[pos + p] += dd * g[p];
            pos += g.size;
        }
    }
    return err * err;
}

StepSizeController::StepSizeController(double k) : k_(k) {
    if (!(k > 0.0)) throw std::invalid_argument("step size k must be positive");
}

StepSizeController update_step_size(StepSizeController c, double new_error) {
    constexpr std::size_t kWindow = 5;
    c.history_.push_back(new_error);
    if (c.history_.size() > kWindow) c.history_.erase(c.history_.begin());
    if (c.history_.size() < kWindow) return c;

    int sign[kWindow - 1];
    for (std::size_t i = 0; i + 1 < kWindow; ++i) {
        const double diff = c.history_[i + 1] - c.history_[i];
        sign[i] = diff < 0.0 ? -1 : (diff > 0.0 ? 1 : 0);
    }
    bool all_down = true;
    bool alternating = sign[0] != 0;
    for (std::size_t i = 0; i + 1 < kWindow; ++i) {
        all_down = all_down && sign[i] == -1;
        if (i > 0) alternating = alternating && sign[i] != 0 && sign[i] == -sign[i - 1];
    }
    if (all_down) {
        c.k_ *= 1.1;
        c.history_.assign(1, new_error);
    } else if (alternating) {
        c.k_ *= 0.9;
        c.history_.assign(1, new_error);
    }
    return c;
}

double normalized_learning_rate(double k, std::span<const double> gradient) {
    double sq = 0.0;
    for (double g : gradient) sq += g * g;
    return sq > 0.0 ? k / std::sqrt(sq) : 0.0;
}

namespace {

kernels::DesignSystem design_for(const AnfisModel& m, const RegressionSet& data, bool parallel) {
    return parallel ? kernels::parallel::anfis_design(m, data) : kernels::serial::anfis_design(m, data);
}

LossGradient gradient_for(const AnfisModel& m, const RegressionSet& data, bool parallel) {
    return parallel ? kernels::parallel::anfis_premise_gradient(m, data)
                    : kernels::serial::anfis_premise_gradient(m, data);
}

void premise_step(AnfisModel& model, const LossGradient& lg, double k) {
    const double eta = normalized_learning_rate(k, lg.gradient);
    if (eta == 0.0) return;
    Vector params = model.premise_params();
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= eta * lg.gradient[i];
    model.set_premise_params(params);
    // Keep every MF center inside its variable's range by translating the MF.
    for (auto& v : model.inputs)
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double c = v[i].mf.center();
            if (c < v.lo() || c > v.hi()) v.set_mf(i, v[i].mf.with_center(std::clamp(c, v.lo(), v.hi())));
        }
}

}  // namespace

namespace {

// Batch least squares, falling back to the recursive estimator when the
// design is rank deficient or underdetermined.
Vector solve_consequents(const kernels::DesignSystem& sys, const AnfisOptions& options, bool& used_recursive) {
    used_recursive = true;
    if (options.solver == ConsequentSolver::batch && sys.a.rows() >= sys.a.cols()) {
        try {
            Vector x = lse_batch(sys.a, sys.y);
            used_recursive = false;
            return x;
        } catch (const SingularSystemError&) {
        }
    }
    return rls_solve(sys.a, sys.y, options.rls_gamma);
}

}  // namespace

EpochResult hybrid_epoch(AnfisModel model, const RegressionSet& data, const StepSizeController& controller,
                         const AnfisOptions& options) {
    if (data.size() == 0) throw std::invalid_argument("hybrid_epoch: empty data");
    const kernels::DesignSystem sys = design_for(model, data, options.parallel);

    EpochResult out;
    const Vector x = solve_consequents(sys, options, out.used_recursive);
    model.set_consequent_params(x);

    double sse = 0.0;
    for (std::size_t i = 0; i < sys.a.rows(); ++i) {
        const double r = dot(sys.a.row(i), x) - sys.y[i];
        sse += r * r;
    }
    out.rmse = rmse_from_sse(sse, data.size());

    premise_step(model, gradient_for(model, data, options.parallel), controller.k());
    out.model = std::move(model);
    return out;
}

std::pair<AnfisModel, TrainReport> anfis_train(AnfisModel model, const RegressionSet& train,
                                               const RegressionSet& test, std::size_t epochs,
                                               const AnfisOptions& options) {
    if (epochs < 1) throw std::invalid_argument("anfis_train: epochs must be >= 1");
    if (train.size() == 0) throw std::invalid_argument("anfis_train: empty training data");
    model.validate();
    const auto start = std::chrono::steady_clock::now();

    TrainReport report;
    StepSizeController controller(options.initial_step);
    for (std::size_t e = 0; e < epochs; ++e) {
        double rmse = 0.0;
        if (options.mode == AnfisMode::hybrid) {
            EpochResult r = hybrid_epoch(std::move(model), train, controller, options);
            model = std::move(r.model);
            rmse = r.rmse;
        } else {
            const LossGradient lg = gradient_for(model, train, options.parallel);
            rmse = rmse_from_sse(lg.sse, train.size());
            premise_step(model, lg, controller.k());
        }
        report.rmse_per_epoch.push_back(rmse);
        controller = update_step_size(controller, rmse);
    }
    if (options.mode == AnfisMode::hybrid) {
        // The last epoch ends with a premise step; refit the consequents so
        // the returned model is the least-squares optimum for its premises.
        bool used_recursive = false;
        model.set_consequent_params(
            solve_consequents(design_for(model, train, options.parallel), options, used_recursive));
    }

    report.final_train_rmse = anfis_rmse(model, train);
    report.final_test_rmse = test.size() ? anfis_rmse(model, test) : 0.0;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(model), report};
}

double anfis_predict(const AnfisModel& model, std::span<const double> x) { return anfis_forward(model, x).output; }

double anfis_rmse(const AnfisModel& model, const RegressionSet& data) {
    return rmse_from_sse(kernels::parallel::anfis_sse(model, data), data.size());
}

}  // namespace tacds
