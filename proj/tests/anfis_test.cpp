#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "tacds/anfis.hpp"
#include "tacds/error.hpp"
#include "tacds/kernels.hpp"
#include "test_util.hpp"

using namespace tacds;
using tacds::testing::random_set;

namespace {

AnfisModel grid_model(std::size_t dim, std::size_t mfs, MfShape shape) {
    std::vector<LinguisticVariable> vars;
    for (std::size_t d = 0; d < dim; ++d)
        vars.push_back(make_uniform_variable("x" + std::to_string(d), 0.0, 1.0, mfs, shape));
    return AnfisModel::grid(std::move(vars));
}

void randomize_consequents(AnfisModel& m, Rng& rng) {
    Vector c(m.consequent_param_count());
    for (double& v : c) v = rng.uniform(-1, 1);
    m.set_consequent_params(c);
}

double half_sse(const AnfisModel& m, const RegressionSet& data) { return 0.5 * kernels::serial::anfis_sse(m, data); }

StepSizeController feed(double k, std::initializer_list<double> errors) {
    StepSizeController c(k);
    for (double e : errors) c = update_step_size(c, e);
    return c;
}

}  // namespace

TEST(AnfisForward, ZeroConsequentsGiveZero) {
    const auto m = grid_model(2, 3, MfShape::gaussian);
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        const double x[2] = {rng.uniform(), rng.uniform()};
        EXPECT_EQ(anfis_forward(m, x).output, 0.0);
    }
}

TEST(AnfisForward, NormalizedStrengthsSumToOne) {
    Rng rng(2);
    for (MfShape shape : {MfShape::gaussian, MfShape::gbell, MfShape::trapezoid, MfShape::triangle}) {
        const auto m = grid_model(3, 3, shape);
        for (int t = 0; t < 100; ++t) {
            const double x[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
            const auto tr = anfis_forward(m, x);
            double s = 0.0;
            for (double w : tr.normalized) s += w;
            EXPECT_NEAR(s, 1.0, 1e-12);
        }
    }
}

TEST(AnfisForward, SingleRuleIsLinear) {
    auto m = grid_model(2, 1, MfShape::gaussian);
    m.set_consequent_params(Vector{0.5, -2.0, 0.25});
    const double x[2] = {0.3, 0.9};
    EXPECT_NEAR(anfis_forward(m, x).output, 0.5 * 0.3 - 2.0 * 0.9 + 0.25, 1e-15);
}

TEST(AnfisForward, DegenerateCoverageThrows) {
    std::vector<LinguisticVariable> vars{
        LinguisticVariable("x", 0, 1, {{"a", MembershipFunction::triangle(0.0, 0.1, 0.2)}})};
    const auto m = AnfisModel::grid(vars);
    const double x[1] = {0.9};
    EXPECT_THROW(anfis_forward(m, x), DegenerateCoverageError);

    Matrix in(3, 1, Vector{0.1, 0.15, 0.9});
    const auto data = make_regression_set(std::move(in), Vector{0, 0, 0});
    try {
        hybrid_epoch(m, data, StepSizeController(0.01), {.parallel = false});
        FAIL() << "expected DegenerateCoverageError";
    } catch (const DegenerateCoverageError& e) {
        EXPECT_EQ(e.sample_index(), 2u);
    }
}

TEST(AnfisForward, RuleOrderDoesNotMatter) {
    Rng rng(3);
    auto m = grid_model(2, 3, MfShape::gbell);
    randomize_consequents(m, rng);
    AnfisModel r = m;
    std::vector<std::size_t> perm(m.rule_count());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm.begin(), perm.end());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        r.rules[i] = m.rules[perm[i]];
        for (std::size_t c = 0; c < 3; ++c) r.consequents(i, c) = m.consequents(perm[i], c);
    }
    for (int t = 0; t < 50; ++t) {
        const double x[2] = {rng.uniform(), rng.uniform()};
        EXPECT_NEAR(anfis_forward(m, x).output, anfis_forward(r, x).output, 1e-12);
    }
}

TEST(RegressorRow, SingleRule) {
    std::vector<LinguisticVariable> vars{make_uniform_variable("x", 0, 5, 1, MfShape::gaussian),
                                         make_uniform_variable("y", 0, 5, 1, MfShape::gaussian)};
    const auto m = AnfisModel::grid(vars);
    const double x[2] = {2, 3};
    EXPECT_EQ(build_regressor_row(anfis_forward(m, x), x), (Vector{2, 3, 1}));
}

TEST(RegressorRow, DotWithConsequentsIsForwardOutput) {
    Rng rng(4);
    auto m = grid_model(4, 3, MfShape::gaussian);
    for (int t = 0; t < 100; ++t) {
        randomize_consequents(m, rng);
        const double x[4] = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
        const auto tr = anfis_forward(m, x);
        const Vector row = build_regressor_row(tr, x);
        ASSERT_EQ(row.size(), 405u);
        EXPECT_NEAR(dot(row, m.consequent_params()), tr.output, 1e-12);
    }
}

TEST(StepSize, NormalizedLearningRate) {
    EXPECT_DOUBLE_EQ(normalized_learning_rate(0.1, Vector{3, 4}), 0.02);
    EXPECT_EQ(normalized_learning_rate(0.1, Vector{0, 0}), 0.0);
}

TEST(StepSize, FourReductionsGrowK) {
    StepSizeController c(0.1);
    for (double e : {5.0, 4.0, 3.0}) {
        c = update_step_size(c, e);
        EXPECT_DOUBLE_EQ(c.k(), 0.1);
    }
    c = update_step_size(c, 2.0);
    EXPECT_DOUBLE_EQ(c.k(), 0.1);
    c = update_step_size(c, 1.0);
    EXPECT_NEAR(c.k(), 0.11, 1e-15);
}

TEST(StepSize, AlternationShrinksK) { EXPECT_NEAR(feed(0.1, {1, 2, 1, 2, 1}).k(), 0.09, 1e-15); }

TEST(StepSize, FlatErrorsLeaveK) { EXPECT_EQ(feed(0.1, {3, 3, 3, 3, 3}).k(), 0.1); }

TEST(StepSize, WindowRestartsAfterFiring) {
    // Five more reductions after the first increase: the rule needs four
    // fresh transitions, so it fires again only at the ninth error.
    StepSizeController c = feed(0.1, {9, 8, 7, 6, 5});
    EXPECT_NEAR(c.k(), 0.11, 1e-15);
    for (double e : {4.0, 3.0, 2.0}) {
        c = update_step_size(c, e);
        EXPECT_NEAR(c.k(), 0.11, 1e-15);
    }
    c = update_step_size(c, 1.0);
    EXPECT_NEAR(c.k(), 0.121, 1e-15);
}

TEST(StepSize, MixedPatternsDoNothing) {
    EXPECT_EQ(feed(0.1, {5, 4, 3, 3, 2}).k(), 0.1);
    EXPECT_EQ(feed(0.1, {1, 2, 1, 1, 2}).k(), 0.1);
    EXPECT_EQ(feed(0.1, {1, 2, 3, 4, 5}).k(), 0.1);
}

TEST(AnfisGradient, PremiseGradientMatchesFiniteDifferences) {
    Rng rng(5);
    for (MfShape shape : {MfShape::gaussian, MfShape::gbell, MfShape::trapezoid, MfShape::triangle}) {
        auto m = grid_model(2, 3, shape);
        randomize_consequents(m, rng);
        const auto data = random_set(50 + static_cast<int>(shape), 40, 2,
                                     [](std::span<const double> x) { return std::sin(3 * x[0]) * x[1]; });
        const Vector params = m.premise_params();
        const LossGradient lg = kernels::serial::anfis_premise_gradient(m, data);
        const double h = 1e-7;
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto f = [&](const Vector& p) {
                AnfisModel c = m;
                c.set_premise_params(p);
                return half_sse(c, data);
            };
            const double fd = tacds::testing::central_difference(f, params, i, h);
            EXPECT_NEAR(lg.gradient[i], fd, 1e-4 * std::max(std::abs(fd), 1e-3)) << to_string(shape) << " " << i;
        }
    }
}

TEST(AnfisGradient, SerialAndParallelAgree) {
    Rng rng(6);
    auto m = grid_model(3, 3, MfShape::gaussian);
    randomize_consequents(m, rng);
    const auto data = random_set(8, 500, 3, [](std::span<const double> x) { return x[0] * x[1] - x[2]; });
    const auto a = kernels::serial::anfis_premise_gradient(m, data);
    const auto b = kernels::parallel::anfis_premise_gradient(m, data);
    EXPECT_NEAR(a.sse, b.sse, 1e-10 * a.sse);
    for (std::size_t i = 0; i < a.gradient.size(); ++i)
        EXPECT_NEAR(a.gradient[i], b.gradient[i], 1e-10 * std::max(1.0, std::abs(a.gradient[i])));
}

TEST(HybridEpoch, RealizableTargetIsFitExactly) {
    Rng rng(7);
    auto truth = grid_model(2, 3, MfShape::gaussian);
    randomize_consequents(truth, rng);
    const auto data = random_set(9, 200, 2, [&](std::span<const double> x) { return anfis_predict(truth, x); });
    const auto r = hybrid_epoch(grid_model(2, 3, MfShape::gaussian), data, StepSizeController(0.01));
    EXPECT_FALSE(r.used_recursive);
    EXPECT_LT(r.rmse, 1e-8);
}

TEST(HybridEpoch, ConsequentsAreLeastSquaresOptimal) {
    const auto data = random_set(10, 150, 2, [](std::span<const double> x) { return std::cos(4 * x[0]) + x[1]; });
    AnfisModel m = grid_model(2, 3, MfShape::gbell);
    StepSizeController c(0.05);
    Rng rng(11);
    for (int epoch = 0; epoch < 3; ++epoch) {
        AnfisModel before_premise = m;
        const auto r = hybrid_epoch(m, data, c);
        before_premise.set_consequent_params(r.model.consequent_params());
        const double sse = kernels::serial::anfis_sse(before_premise, data);
        EXPECT_NEAR(rmse_from_sse(sse, data.size()), r.rmse, 1e-12);
        for (int t = 0; t < 100; ++t) {
            Vector p = before_premise.consequent_params();
            for (double& v : p) v += 1e-4 * rng.normal();
            AnfisModel q = before_premise;
            q.set_consequent_params(p);
            EXPECT_GE(kernels::serial::anfis_sse(q, data), sse * (1.0 - 1e-12));
        }
        m = r.model;
        c = update_step_size(c, r.rmse);
    }
}

TEST(HybridEpoch, RecursiveSolverAgreesOnWellPosedData) {
    const auto data = random_set(12, 300, 2, [](std::span<const double> x) { return x[0] * x[0] - x[1]; });
    const auto m = grid_model(2, 2, MfShape::gaussian);
    const auto batch = hybrid_epoch(m, data, StepSizeController(0.01));
    AnfisOptions opt;
    opt.solver = ConsequentSolver::recursive;
    opt.rls_gamma = 1e8;
    const auto rec = hybrid_epoch(m, data, StepSizeController(0.01), opt);
    EXPECT_TRUE(rec.used_recursive);
    EXPECT_NEAR(batch.rmse, rec.rmse, 1e-6);
}

TEST(AnfisTrain, CurveLengthAndDeterminism) {
    const auto data = random_set(13, 120, 2, [](std::span<const double> x) { return x[0] + std::sin(5 * x[1]); });
    const auto [m1, r1] = anfis_train(grid_model(2, 3, MfShape::gaussian), data, data, 15);
    const auto [m2, r2] = anfis_train(grid_model(2, 3, MfShape::gaussian), data, data, 15);
    EXPECT_EQ(r1.rmse_per_epoch.size(), 15u);
    EXPECT_EQ(r1.rmse_per_epoch, r2.rmse_per_epoch);
    EXPECT_EQ(m1.premise_params(), m2.premise_params());
    for (double e : r1.rmse_per_epoch) EXPECT_GE(e, 0.0);
    // The returned consequents are refit on the final premises.
    EXPECT_LE(r1.final_train_rmse, r1.rmse_per_epoch.front() * 1.5);
}

TEST(AnfisTrain, CentersStayInsideVariableRanges) {
    const auto data = random_set(15, 200, 2, [](std::span<const double> x) { return std::exp(4 * x[0]) * x[1]; });
    AnfisOptions big;
    big.initial_step = 0.5;
    for (MfShape shape : {MfShape::gaussian, MfShape::gbell, MfShape::trapezoid, MfShape::triangle}) {
        const auto m = anfis_train(grid_model(2, 3, shape), data, data, 20, big).first;
        for (const auto& v : m.inputs)
            for (std::size_t i = 0; i < v.size(); ++i) {
                EXPECT_GE(v[i].mf.center(), v.lo());
                EXPECT_LE(v[i].mf.center(), v.hi());
            }
    }
}

TEST(AnfisTrain, SerialAndParallelKernelsGiveSameCurve) {
    const auto data = random_set(14, 300, 2, [](std::span<const double> x) { return x[0] * x[1]; });
    AnfisOptions serial;
    serial.parallel = false;
    const auto a = anfis_train(grid_model(2, 3, MfShape::gaussian), data, data, 5, serial).second;
    const auto b = anfis_train(grid_model(2, 3, MfShape::gaussian), data, data, 5).second;
    for (std::size_t e = 0; e < 5; ++e) EXPECT_NEAR(a.rmse_per_epoch[e], b.rmse_per_epoch[e], 1e-9);
}

TEST(AnfisTrain, ZeroEpochsRejected) {
    const auto data = random_set(15, 10, 1, [](std::span<const double> x) { return x[0]; });
    EXPECT_THROW(anfis_train(grid_model(1, 2, MfShape::gaussian), data, data, 0), std::invalid_argument);
}

TEST(AnfisTrain, BackpropOnlyWithZeroConsequentsIsStuck) {
    const auto data = random_set(16, 60, 2, [](std::span<const double> x) { return x[0] + x[1]; });
    const auto start = grid_model(2, 3, MfShape::gaussian);
    AnfisOptions opt;
    opt.mode = AnfisMode::backprop_only;
    const auto [m, r] = anfis_train(start, data, data, 5, opt);
    for (double e : r.rmse_per_epoch) EXPECT_EQ(e, r.rmse_per_epoch.front());
    EXPECT_EQ(m.premise_params(), start.premise_params());
    EXPECT_EQ(anfis_predict(m, data.x(0)), 0.0);
}

TEST(AnfisModel, ParameterRoundTripAndProjection) {
    auto m = grid_model(2, 3, MfShape::trapezoid);
    Vector p = m.premise_params();
    EXPECT_EQ(p.size(), m.premise_param_count());
    m.set_premise_params(p);
    EXPECT_EQ(m.premise_params(), p);
    // Swap two knots of the first trapezoid; projection re-sorts them.
    std::swap(p[1], p[2]);
    p[1] += 0.01;
    m.set_premise_params(p);
    const auto q = m.inputs[0][0].mf.params();
    EXPECT_TRUE(std::is_sorted(q.begin(), q.end()));
    EXPECT_THROW(m.set_consequent_params(Vector(3)), std::invalid_argument);
}
