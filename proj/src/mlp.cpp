#include "tacds/mlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "tacds/error.hpp"
#include "tacds/kernels.hpp"
#include "tacds/rng.hpp"

namespace tacds {

MlpModel MlpModel::random(std::size_t input_dim, std::size_t hidden_units, std::uint64_t seed) {
    MlpModel m = zeros(input_dim, hidden_units);
    Rng rng(seed);
    const double in_bound = 1.0 / std::sqrt(static_cast<double>(input_dim + 1));
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(hidden_units + 1));
    const std::size_t hidden_block = (input_dim + 1) * hidden_units;
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        const double b = i < hidden_block ? in_bound : out_bound;
        m.weights[i] = rng.uniform(-b, b);
    }
    return m;
}

MlpModel MlpModel::zeros(std::size_t input_dim, std::size_t hidden_units) {
    if (input_dim < 1 || hidden_units < 1) throw std::invalid_argument("mlp: input_dim and hidden_units must be >= 1");
    return {input_dim, hidden_units, Vector(weight_count(input_dim, hidden_units), 0.0)};
}

void MlpModel::validate() const {
    if (weights.size() != weight_count(input_dim, hidden_units))
        throw std::invalid_argument("mlp: weight vector length does not match architecture");
}

double mlp_forward(const MlpModel& model, std::span<const double> x) {
    const std::size_t d = model.input_dim;
    if (x.size() != d) throw std::invalid_argument("mlp_forward: input arity mismatch");
    const double* w = model.weights.data();
    const double* out = w + (d + 1) * model.hidden_units;
    double y = out[model.hidden_units];
    for (std::size_t h = 0; h < model.hidden_units; ++h) {
        const double* wh = w + h * (d + 1);
        double s = wh[d];
        for (std::size_t i = 0; i < d; ++i) s += wh[i] * x[i];
        y += out[h] * std::tanh(s);
    }
    return y;
}

double accumulate_mlp_gradient(const MlpModel& model, std::span<const double> x, double target,
                               std::span<double> gradient) {
    const std::size_t d = model.input_dim;
    const std::size_t hn = model.hidden_units;
    const double* w = model.weights.data();
    const double* out = w + (d + 1) * hn;
    double* g_out = gradient.data() + (d + 1) * hn;

    double hidden_buf[64];
    std::vector<double> hidden_heap;
    double* z = hidden_buf;
    if (hn > 64) {
        hidden_heap.resize(hn);
        z = hidden_heap.data();
    }
    double y = out[hn];
    for (std::size_t h = 0; h < hn; ++h) {
        const double* wh = w + h * (d + 1);
        double s = wh[d];
        for (std::size_t i = 0; i < d; ++i) s += wh[i] * x[i];
        z[h] = std::tanh(s);
        y += out[h] * z[h];
    }
    const double err = y - target;
    g_out[hn] += err;
    for (std::size_t h = 0; h < hn; ++h) {
        g_out[h] += err * z[h];
        const double delta = err * out[h] * (1.0 - z[h] * z[h]);
        double* gh = gradient.data() + h * (d + 1);
        for (std::size_t i = 0; i < d; ++i) gh[i] += delta * x[i];
        gh[d] += delta;
    }
    return err * err;
}

Vector mlp_gradient(const MlpModel& model, const RegressionSet& data) {
    return kernels::parallel::mlp_loss_gradient(model, data).gradient;
}

double mlp_rmse(const MlpModel& model, const RegressionSet& data) {
    return rmse_from_sse(kernels::parallel::mlp_sse(model, data), data.size());
}

std::pair<MlpModel, TrainReport> scg_train(MlpModel model, const RegressionSet& train, const RegressionSet& test,
                                           std::size_t epochs, const ScgOptions& options) {
    if (epochs < 1) throw std::invalid_argument("scg_train: epochs must be >= 1");
    if (train.size() == 0) throw std::invalid_argument("scg_train: empty training data");
    if (!(options.sigma0 > 0.0)) throw std::invalid_argument("scg_train: sigma0 must be positive");
    model.validate();
    const auto start = std::chrono::steady_clock::now();

    constexpr double kLambdaMin = 1e-15;
    constexpr double kLambdaMax = 1e100;
    const std::size_t n = model.weights.size();

    auto evaluate = [&](const Vector& w) {
        MlpModel probe{model.input_dim, model.hidden_units, w};
        return kernels::parallel::mlp_loss_gradient(probe, train);
    };

    Vector& w = model.weights;
    LossGradient current = evaluate(w);
    double error = 0.5 * current.sse;
    if (!std::isfinite(error)) throw DivergedError("scg_train: non-finite loss", 0);

    ScgState st;
    st.sigma0 = options.sigma0;
    st.lambda = options.initial_lambda;
    st.direction.resize(n);
    for (std::size_t i = 0; i < n; ++i) st.direction[i] = -current.gradient[i];

    double mu = 0.0;
    double kappa = 0.0;
    double theta = 0.0;
    TrainReport report;
    Vector trial(n);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        const Vector& g = current.gradient;
        if (st.success) {
            mu = dot(st.direction, g);
            if (mu >= 0.0) {
                for (std::size_t i = 0; i < n; ++i) st.direction[i] = -g[i];
                mu = dot(st.direction, g);
            }
            kappa = dot(st.direction, st.direction);
            if (kappa < 1e-300) {
                // Gradient vanished: converged.
                report.rmse_per_epoch.push_back(rmse_from_sse(current.sse, train.size()));
                continue;
            }
            // Second-order information along the direction by finite differencing.
            const double sigma = st.sigma0 / std::sqrt(kappa);
            for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] + sigma * st.direction[i];
            const LossGradient plus = evaluate(trial);
            theta = 0.0;
            for (std::size_t i = 0; i < n; ++i) theta += st.direction[i] * (plus.gradient[i] - g[i]);
            theta /= sigma;
        }

        // Scale the curvature; force it positive definite.
        double delta = theta + st.lambda * kappa;
        if (delta <= 0.0) {
            delta = st.lambda * kappa;
            st.lambda_bar = st.lambda;
            st.lambda = st.lambda - theta / kappa;
        } else {
            st.lambda_bar = st.lambda;
        }
        const double alpha = -mu / delta;

        for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] + alpha * st.direction[i];
        LossGradient next = evaluate(trial);
        const double next_error = 0.5 * next.sse;
        if (!std::isfinite(next_error)) throw DivergedError("scg_train: non-finite loss", epoch);

        st.comparison = 2.0 * (next_error - error) / (alpha * mu);
        if (st.comparison >= 0.0) {
            st.success = true;
            ++st.successes_since_restart;
            w = trial;
            error = next_error;
            const Vector old_gradient = std::move(current.gradient);
            current = std::move(next);
            if (st.successes_since_restart >= n) {
                for (std::size_t i = 0; i < n; ++i) st.direction[i] = -current.gradient[i];
                st.successes_since_restart = 0;
            } else {
                double num = 0.0;
                for (std::size_t i = 0; i < n; ++i) num += (old_gradient[i] - current.gradient[i]) * current.gradient[i];
                const double beta = num / mu;
                for (std::size_t i = 0; i < n; ++i) st.direction[i] = beta * st.direction[i] - current.gradient[i];
            }
        } else {
            st.success = false;
        }

        if (st.comparison < 0.25) st.lambda = std::min(4.0 * st.lambda, kLambdaMax);
        if (st.comparison > 0.75) st.lambda = std::max(0.5 * st.lambda, kLambdaMin);

        report.rmse_per_epoch.push_back(rmse_from_sse(current.sse, train.size()));
    }

    report.final_train_rmse = rmse_from_sse(current.sse, train.size());
    report.final_test_rmse = test.size() ? mlp_rmse(model, test) : 0.0;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(model), report};
}

}  // namespace tacds
