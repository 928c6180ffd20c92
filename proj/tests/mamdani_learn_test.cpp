#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "tacds/mamdani_learn.hpp"
#include "test_util.hpp"

using namespace tacds;
using tacds::testing::random_set;

namespace {

LinguisticVariable fuel() {
    return LinguisticVariable("fuel", 0, 1,
                              {{"low", MembershipFunction::triangle(-0.5, 0.0, 0.5)},
                               {"half", MembershipFunction::triangle(0.0, 0.5, 1.0)},
                               {"full", MembershipFunction::triangle(0.5, 1.0, 1.5)}});
}

LinguisticVariable intercept_time() {
    return LinguisticVariable("intercept_time", 0, 1,
                              {{"fast", MembershipFunction::triangle(0.0, 0.5, 1.0)},
                               {"normal", MembershipFunction::triangle(0.5, 0.75, 1.0)},
                               {"slow", MembershipFunction::triangle(0.75, 1.0, 1.25)}});
}

LinguisticVariable score() {
    return LinguisticVariable("score", 0, 1,
                              {{"bad", MembershipFunction::triangle(-0.5, 0.0, 0.5)},
                               {"acceptable", MembershipFunction::triangle(0.0, 0.5, 1.0)},
                               {"good", MembershipFunction::triangle(0.5, 1.0, 1.5)}});
}

std::vector<LinguisticVariable> uniform_inputs(std::size_t dim, std::size_t mfs) {
    std::vector<LinguisticVariable> v;
    for (std::size_t d = 0; d < dim; ++d)
        v.push_back(make_uniform_variable("x" + std::to_string(d), 0, 1, mfs, MfShape::triangle));
    return v;
}

MamdaniModel small_model(const RegressionSet& data) {
    return wang_mendel(data, uniform_inputs(2, 3), make_uniform_variable("y", 0, 1, 3, MfShape::triangle));
}

RegressionSet smooth_set(std::uint64_t seed, std::size_t n) {
    return random_set(seed, n, 2, [](std::span<const double> x) { return 0.2 + 0.6 * x[0] * (1.0 - 0.5 * x[1]); });
}

}  // namespace

TEST(WangMendel, WorkedExampleDegrees) {
    const std::vector<LinguisticVariable> inputs{fuel(), intercept_time()};
    const double x1[2] = {0.4, 0.1};
    const auto a = wang_mendel_candidate(inputs, score(), x1, 0.3);
    EXPECT_EQ(a.rule.antecedent, (Antecedent{1, 0}));
    EXPECT_EQ(a.rule.consequent, 1u);
    EXPECT_NEAR(a.degree, 0.096, 1e-12);

    const double x2[2] = {0.4, 0.3};
    const auto b = wang_mendel_candidate(inputs, score(), x2, 0.4);
    EXPECT_EQ(b.rule.antecedent, (Antecedent{1, 0}));
    EXPECT_NEAR(b.degree, 0.384, 1e-12);
}

TEST(WangMendel, ConflictKeepsHigherDegree) {
    Matrix x(2, 2, Vector{0.4, 0.1, 0.4, 0.3});
    const auto data = make_regression_set(std::move(x), Vector{0.3, 0.4});
    const auto model = wang_mendel(data, {fuel(), intercept_time()}, score());
    ASSERT_EQ(model.rules.size(), 1u);
    EXPECT_NEAR(model.rules[0].weight, 0.384, 1e-12);
    EXPECT_EQ(model.rules[0].consequent, 1u);

    // Reversed order: the stronger rule still wins.
    Matrix xr(2, 2, Vector{0.4, 0.3, 0.4, 0.1});
    const auto rev = wang_mendel(make_regression_set(std::move(xr), Vector{0.4, 0.3}), {fuel(), intercept_time()},
                                 score());
    EXPECT_NEAR(rev.rules[0].weight, 0.384, 1e-12);
}

TEST(WangMendel, SinglePairGivesOneRule) {
    Matrix x(1, 2, Vector{0.2, 0.7});
    EXPECT_EQ(small_model(make_regression_set(std::move(x), Vector{0.5})).rules.size(), 1u);
}

TEST(WangMendel, TiesGoToLowestIndex) {
    Matrix x(1, 2, Vector{0.25, 0.75});
    const auto m = small_model(make_regression_set(std::move(x), Vector{0.25}));
    EXPECT_EQ(m.rules[0].antecedent, (Antecedent{0, 1}));
    EXPECT_EQ(m.rules[0].consequent, 0u);
}

TEST(WangMendel, AgreesWithBruteForceGroupMax) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        const std::size_t n = 1 + rng.index(100);
        const auto data = random_set(seed * 7, n, 3, [&](std::span<const double>) { return rng.uniform(); });
        const auto inputs = uniform_inputs(3, 3);
        const auto output = make_uniform_variable("y", 0, 1, 3, MfShape::triangle);
        const auto model = wang_mendel(data, inputs, output);

        auto argmax = [](const LinguisticVariable& v, double x, double& best) {
            std::size_t arg = 0;
            best = -1.0;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (v.degree(i, x) > best) {
                    best = v.degree(i, x);
                    arg = i;
                }
            return arg;
        };
        std::map<Antecedent, std::pair<double, std::size_t>> groups;
        for (std::size_t i = 0; i < n; ++i) {
            Antecedent a;
            double deg = 1.0, d = 0.0;
            for (std::size_t v = 0; v < 3; ++v) {
                a.push_back(argmax(inputs[v], data.x(i)[v], d));
                deg *= d;
            }
            const std::size_t c = argmax(output, data.y(i), d);
            deg *= d;
            auto it = groups.find(a);
            if (it == groups.end() || deg > it->second.first) groups[a] = {deg, c};
        }
        ASSERT_EQ(model.rules.size(), groups.size()) << "seed " << seed;
        std::size_t k = 0;
        for (const auto& [a, best] : groups) {
            EXPECT_EQ(model.rules[k].antecedent, a);
            EXPECT_EQ(model.rules[k].weight, best.first);
            EXPECT_EQ(model.rules[k].consequent, best.second);
            ++k;
        }
        EXPECT_LE(model.rules.size(), 27u);
    }
}

TEST(Centers, EncodeDecodeRoundTrip) {
    const auto m = small_model(smooth_set(1, 50));
    const Vector g = encode_centers(m);
    EXPECT_EQ(g.size(), 9u);
    EXPECT_EQ(encode_centers(decode_centers(m, g)), g);
    Vector out = g;
    out[0] = -3.0;
    out[8] = 7.0;
    const Vector clipped = encode_centers(decode_centers(m, out));
    EXPECT_EQ(clipped[0], 0.0);
    EXPECT_EQ(clipped[8], 1.0);
    for (const auto& [lo, hi] : center_bounds(m)) {
        EXPECT_EQ(lo, 0.0);
        EXPECT_EQ(hi, 1.0);
    }
}

TEST(GdTune, SurrogateGradientMatchesFiniteDifferences) {
    Rng rng(3);
    const auto data = smooth_set(2, 60);
    const auto base = small_model(data);
    int checked = 0;
    for (int trial = 0; checked < 30 && trial < 300; ++trial) {
        Vector g = encode_centers(base);
        for (auto& v : g) v = std::clamp(v + rng.uniform(-0.1, 0.1), 0.02, 0.98);
        const auto m = decode_centers(base, g);
        const LossGradient lg = mamdani_surrogate_gradient(m, data);
        const std::size_t i = rng.index(g.size());
        auto f = [&](const Vector& p) { return 0.5 * mamdani_surrogate_gradient(decode_centers(base, p), data).sse; };
        const double fd = tacds::testing::central_difference(f, g, i, 1e-7);
        if (std::abs(fd) < 1e-6) continue;
        EXPECT_NEAR(lg.gradient[i], fd, 1e-3 * std::abs(fd)) << "gene " << i;
        ++checked;
    }
    EXPECT_EQ(checked, 30);
}

TEST(GdTune, ZeroLearningRateKeepsParameters) {
    const auto data = smooth_set(4, 80);
    const auto m = small_model(data);
    const auto [tuned, report] = gd_tune(m, data, {0.0, 0.3, 5});
    EXPECT_EQ(encode_centers(tuned), encode_centers(m));
    for (double e : report.rmse_per_epoch) EXPECT_EQ(e, report.rmse_per_epoch.front());
}

TEST(GdTune, SmallStepNeverIncreasesObjective) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto data = smooth_set(100 + seed, 80);
        const auto m = small_model(data);
        const double before = mamdani_surrogate_gradient(m, data).sse;
        const auto tuned = gd_tune(m, data, {1e-4, 0.3, 1}).first;
        EXPECT_LE(mamdani_surrogate_gradient(tuned, data).sse, before) << "seed " << seed;
    }
}

TEST(GdTune, CentersStayInRangeAndNegativeRateRejected) {
    const auto data = smooth_set(5, 80);
    const auto tuned = gd_tune(small_model(data), data, {50.0, 0.9, 10}).first;
    for (double c : encode_centers(tuned)) {
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
    }
    EXPECT_THROW(gd_tune(small_model(data), data, {-1.0, 0.3, 1}), std::invalid_argument);
}

TEST(GdTune, ReportsOneEntryPerEpoch) {
    const auto data = smooth_set(6, 80);
    const auto [m, report] = gd_tune(small_model(data), data, {0.5, 0.3, 10});
    EXPECT_EQ(report.rmse_per_epoch.size(), 10u);
    EXPECT_DOUBLE_EQ(report.final_train_rmse, mamdani_rmse(m, data));
}

TEST(Ga, BestFitnessNeverDecreases) {
    const auto data = smooth_set(7, 60);
    const auto m = small_model(data);
    GaConfig cfg;
    cfg.population = 20;
    cfg.generations = 30;
    cfg.mutation_rate = 0.05;
    const auto r = ga_optimize(m, data, cfg);
    ASSERT_EQ(r.best_fitness.size(), 30u);
    EXPECT_GE(r.best_fitness.front(), r.initial_best_fitness);
    for (std::size_t g = 1; g < r.best_fitness.size(); ++g) EXPECT_GE(r.best_fitness[g], r.best_fitness[g - 1]);
    EXPECT_NEAR(-mamdani_rmse(r.model, data), r.best_fitness.back(), 1e-12);
    EXPECT_GE(r.initial_best_fitness, -mamdani_rmse(m, data));
    for (const auto& c : r.final_population)
        for (double v : c) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
}

TEST(Ga, NoVariationKeepsClonedPopulation) {
    const auto data = smooth_set(8, 40);
    const auto m = small_model(data);
    GaConfig cfg;
    cfg.population = 10;
    cfg.generations = 15;
    cfg.mutation_rate = 0.0;
    const std::vector<Chromosome> clones(cfg.population, encode_centers(m));
    const auto r = ga_evolve(m, data, clones, cfg);
    EXPECT_EQ(r.final_population, clones);
    for (double f : r.best_fitness) EXPECT_EQ(f, r.initial_best_fitness);
}

TEST(Ga, DeterministicForSeed) {
    const auto data = smooth_set(9, 40);
    const auto m = small_model(data);
    GaConfig cfg;
    cfg.population = 12;
    cfg.generations = 10;
    const auto a = ga_optimize(m, data, cfg);
    const auto b = ga_optimize(m, data, cfg);
    EXPECT_EQ(a.best_fitness, b.best_fitness);
    EXPECT_EQ(a.final_population, b.final_population);
}

TEST(Ga, ConfigValidation) {
    GaConfig cfg;
    cfg.population = 1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.mutation_rate = 1.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.elite_count = cfg.population;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
