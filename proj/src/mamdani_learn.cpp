#include "tacds/mamdani_learn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "tacds/error.hpp"
#include "tacds/kernels.hpp"
#include "tacds/rng.hpp"

namespace tacds {

namespace {

std::pair<std::size_t, double> max_region(const LinguisticVariable& var, double value) {
    std::size_t best = 0;
    double best_degree = var.degree(0, value);
    for (std::size_t m = 1; m < var.size(); ++m) {
        const double d = var.degree(m, value);
        if (d > best_degree) {
            best = m;
            best_degree = d;
        }
    }
    return {best, best_degree};
}

}  // namespace

CandidateRule wang_mendel_candidate(std::span<const LinguisticVariable> inputs, const LinguisticVariable& output,
                                    std::span<const double> x, double y) {
    if (x.size() != inputs.size()) throw std::invalid_argument("wang_mendel: input arity mismatch");
    CandidateRule c;
    c.rule.antecedent.resize(inputs.size());
    double degree = 1.0;
    for (std::size_t v = 0; v < inputs.size(); ++v) {
        const auto [m, d] = max_region(inputs[v], x[v]);
        c.rule.antecedent[v] = m;
        degree *= d;
    }
    const auto [k, dk] = max_region(output, y);
    c.rule.consequent = k;
    c.degree = degree * dk;
    c.rule.weight = c.degree;
    return c;
}

MamdaniModel wang_mendel(const RegressionSet& data, std::vector<LinguisticVariable> inputs, LinguisticVariable output) {
    if (data.size() == 0) throw std::invalid_argument("wang_mendel: empty data");
    if (data.dim() != inputs.size()) throw std::invalid_argument("wang_mendel: input arity mismatch");
    std::map<Antecedent, CandidateRule> groups;
    for (std::size_t i = 0; i < data.size(); ++i) {
        CandidateRule c = wang_mendel_candidate(inputs, output, data.x(i), data.y(i));
        auto [it, inserted] = groups.try_emplace(c.rule.antecedent, c);
        if (!inserted && c.degree > it->second.degree) it->second = std::move(c);
    }
    MamdaniModel model{std::move(inputs), std::move(output), {}};
    model.rules.reserve(groups.size());
    for (auto& [key, c] : groups) model.rules.push_back(std::move(c.rule));
    model.validate();
    return model;
}

Vector encode_centers(const MamdaniModel& model) {
    Vector genes;
    for (const auto& v : model.inputs)
        for (const auto& m : v.mfs()) genes.push_back(m.mf.center());
    for (const auto& m : model.output.mfs()) genes.push_back(m.mf.center());
    return genes;
}

std::vector<std::pair<double, double>> center_bounds(const MamdaniModel& model) {
    std::vector<std::pair<double, double>> out;
    for (const auto& v : model.inputs)
        for (std::size_t m = 0; m < v.size(); ++m) out.emplace_back(v.lo(), v.hi());
    for (std::size_t m = 0; m < model.output.size(); ++m) out.emplace_back(model.output.lo(), model.output.hi());
    return out;
}

MamdaniModel decode_centers(const MamdaniModel& model, std::span<const double> genes) {
    MamdaniModel out = model;
    std::size_t pos = 0;
    auto apply = [&](LinguisticVariable& var) {
        for (std::size_t m = 0; m < var.size(); ++m) {
            if (pos >= genes.size()) throw std::invalid_argument("decode_centers: too few genes");
            var.set_mf(m, var[m].mf.with_center(std::clamp(genes[pos++], var.lo(), var.hi())));
        }
    };
    for (auto& v : out.inputs) apply(v);
    apply(out.output);
    if (pos != genes.size()) throw std::invalid_argument("decode_centers: too many genes");
    return out;
}

double mamdani_rmse(const MamdaniModel& model, const RegressionSet& data) {
    const MamdaniEvaluator eval(model);
    double sse = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = eval(data.x(i)).value - data.y(i);
        sse += r * r;
    }
    return rmse_from_sse(sse, data.size());
}

namespace {

struct SurrogatePass {
    double output = 0.0;
    bool covered = false;
};

// Surrogate output for one sample; when `gradient` is non-empty also adds
// err·∂y/∂center to it.
SurrogatePass surrogate_sample(const MamdaniModel& model, std::span<const double> x, double err_scale,
                               std::span<double> gradient, bool want_gradient, double target) {
    const std::size_t d = model.inputs.size();
    std::vector<std::size_t> offsets(d);
    std::size_t total = 0;
    for (std::size_t v = 0; v < d; ++v) {
        offsets[v] = total;
        total += model.inputs[v].size();
    }
    const std::size_t out_offset = total;

    std::vector<double> xc(d), deg(total);
    for (std::size_t v = 0; v < d; ++v) {
        const auto& var = model.inputs[v];
        xc[v] = var.clip(x[v]);
        for (std::size_t m = 0; m < var.size(); ++m) deg[offsets[v] + m] = var[m].mf.eval(xc[v]);
    }

    const std::size_t n_rules = model.rules.size();
    std::vector<double> act(n_rules), centroid(n_rules);
    double total_act = 0.0;
    double weighted = 0.0;
    for (std::size_t r = 0; r < n_rules; ++r) {
        const auto& rule = model.rules[r];
        double a = rule.weight;
        for (std::size_t v = 0; v < d; ++v) a *= deg[offsets[v] + rule.antecedent[v]];
        act[r] = a;
        centroid[r] = model.output[rule.consequent].mf.centroid();
        total_act += a;
        weighted += a * centroid[r];
    }
    SurrogatePass pass;
    if (!(total_act > 0.0)) {
        pass.output = 0.5 * (model.output.lo() + model.output.hi());
        return pass;
    }
    pass.covered = true;
    pass.output = weighted / total_act;
    if (!want_gradient) return pass;

    const double err = (pass.output - target) * err_scale;
    for (std::size_t r = 0; r < n_rules; ++r) {
        const auto& rule = model.rules[r];
        gradient[out_offset + rule.consequent] += err * act[r] / total_act;
        const double d_act = err * (centroid[r] - pass.output) / total_act;
        if (d_act == 0.0) continue;
        for (std::size_t v = 0; v < d; ++v) {
            const std::size_t m = rule.antecedent[v];
            double others = rule.weight;
            for (std::size_t u = 0; u < d; ++u)
                if (u != v) others *= deg[offsets[u] + rule.antecedent[u]];
            // Translating an MF by δ changes μ(x) by -μ'(x)·δ.
            gradient[offsets[v] + m] += d_act * others * -model.inputs[v][m].mf.dx(xc[v]);
        }
    }
    return pass;
}

}  // namespace

double mamdani_surrogate_output(const MamdaniModel& model, std::span<const double> x) {
    return surrogate_sample(model, x, 1.0, {}, false, 0.0).output;
}

LossGradient mamdani_surrogate_gradient(const MamdaniModel& model, const RegressionSet& data) {
    LossGradient lg;
    lg.gradient.assign(encode_centers(model).size(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto pass = surrogate_sample(model, data.x(i), 1.0, lg.gradient, true, data.y(i));
        const double r = pass.output - data.y(i);
        lg.sse += r * r;
    }
    return lg;
}

std::pair<MamdaniModel, TrainReport> gd_tune(MamdaniModel model, const RegressionSet& data,
                                             const GdTuneOptions& options) {
    if (!(options.learning_rate >= 0.0)) throw std::invalid_argument("gd_tune: learning rate must be >= 0");
    if (data.size() == 0) throw std::invalid_argument("gd_tune: empty data");
    model.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto bounds = center_bounds(model);
    Vector genes = encode_centers(model);
    Vector velocity(genes.size(), 0.0);
    const double scale = 1.0 / static_cast<double>(data.size());

    TrainReport report;
    double initial_error = -1.0;
    for (std::size_t e = 0; e < options.epochs; ++e) {
        const LossGradient lg = mamdani_surrogate_gradient(model, data);
        const double error = 0.5 * lg.sse;
        if (initial_error < 0.0) initial_error = error;
        if (!std::isfinite(error) || error > 1e6 * std::max(initial_error, 1e-300))
            throw DivergedError("gd_tune diverged", e);
        for (std::size_t i = 0; i < genes.size(); ++i) {
            velocity[i] = options.momentum * velocity[i] - options.learning_rate * scale * lg.gradient[i];
            genes[i] = std::clamp(genes[i] + velocity[i], bounds[i].first, bounds[i].second);
        }
        model = decode_centers(model, genes);
        report.rmse_per_epoch.push_back(mamdani_rmse(model, data));
    }
    report.final_train_rmse = mamdani_rmse(model, data);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(model), report};
}

void GaConfig::validate() const {
    if (population < 2) throw std::invalid_argument("ga: population must be >= 2");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw std::invalid_argument("ga: mutation rate outside [0,1]");
    if (elite_count >= population) throw std::invalid_argument("ga: elite count must be < population");
    if (tournament_size < 1) throw std::invalid_argument("ga: tournament size must be >= 1");
}

namespace {

Vector fitness_of(const MamdaniModel& model, const std::vector<Chromosome>& pop, const RegressionSet& data) {
    Vector rmse = kernels::parallel::population_rmse(model, pop, data);
    for (double& r : rmse) r = -r;
    return rmse;
}

std::vector<std::size_t> ranked(const Vector& fitness) {
    std::vector<std::size_t> order(fitness.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
    return order;
}

}  // namespace

GaResult ga_evolve(const MamdaniModel& model, const RegressionSet& data, std::vector<Chromosome> population,
                   const GaConfig& config) {
    config.validate();
    if (population.size() != config.population) throw std::invalid_argument("ga: population size mismatch");
    const auto bounds = center_bounds(model);
    const std::size_t n_genes = bounds.size();
    for (const auto& c : population)
        if (c.size() != n_genes) throw std::invalid_argument("ga: chromosome length mismatch");

    Rng rng(config.seed);
    Vector fitness = fitness_of(model, population, data);

    auto tournament = [&]() -> const Chromosome& {
        std::size_t best = rng.index(population.size());
        for (std::size_t t = 1; t < config.tournament_size; ++t) {
            const std::size_t cand = rng.index(population.size());
            if (fitness[cand] > fitness[best] || (fitness[cand] == fitness[best] && cand < best)) best = cand;
        }
        return population[best];
    };
    auto mutate = [&](Chromosome& c) {
        for (std::size_t g = 0; g < n_genes; ++g)
            if (rng.uniform() < config.mutation_rate) c[g] = rng.uniform(bounds[g].first, bounds[g].second);
    };

    GaResult result{model, fitness[ranked(fitness).front()], {}, {}};
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        const auto order = ranked(fitness);
        std::vector<Chromosome> next;
        next.reserve(population.size());
        for (std::size_t e = 0; e < config.elite_count; ++e) next.push_back(population[order[e]]);
        while (next.size() < population.size()) {
            Chromosome a = tournament();
            Chromosome b = tournament();
            if (n_genes > 1) {
                const std::size_t cut = 1 + rng.index(n_genes - 1);
                for (std::size_t g = cut; g < n_genes; ++g) std::swap(a[g], b[g]);
            }
            mutate(a);
            mutate(b);
            next.push_back(std::move(a));
            if (next.size() < population.size()) next.push_back(std::move(b));
        }
        population = std::move(next);
        fitness = fitness_of(model, population, data);
        result.best_fitness.push_back(fitness[ranked(fitness).front()]);
    }

    const std::size_t best = ranked(fitness).front();
    result.model = decode_centers(model, population[best]);
    result.final_population = std::move(population);
    return result;
}

GaResult ga_optimize(const MamdaniModel& model, const RegressionSet& data, const GaConfig& config) {
    config.validate();
    const auto bounds = center_bounds(model);
    // Separate stream for initialisation so ga_evolve's stream stays seed-aligned.
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<Chromosome> population;
    population.push_back(encode_centers(model));
    while (population.size() < config.population) {
        Chromosome c(bounds.size());
        for (std::size_t g = 0; g < bounds.size(); ++g) c[g] = rng.uniform(bounds[g].first, bounds[g].second);
        population.push_back(std::move(c));
    }
    return ga_evolve(model, data, std::move(population), config);
}

}  // namespace tacds
