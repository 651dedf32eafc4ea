#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "hdes/bfgs.hpp"
#include "hdes/error.hpp"
#include "hdes/parser.hpp"
#include "hdes/solver.hpp"

using namespace hdes;

namespace {

DESystem load(const std::string& name) { return parse_problem_file(std::string(HDES_PROBLEM_DIR) + "/" + name); }

double rosenbrock(std::span<const double> p) {
    const double a = 1 - p[0], b = p[1] - p[0] * p[0];
    return a * a + 100 * b * b;
}

BfgsOptions exhaustive(std::size_t iters) {
    BfgsOptions o;
    o.max_iterations = iters;
    o.target_loss = -std::numeric_limits<double>::infinity();
    return o;
}

}  // namespace

TEST(Bfgs, Parabola) {
    const auto r = bfgs_minimize([](std::span<const double> p) { return (p[0] - 3) * (p[0] - 3); }, {0.0},
                                 exhaustive(100));
    EXPECT_NEAR(r.x[0], 3.0, 1e-8);
}

TEST(Bfgs, Rosenbrock) {
    const auto r = bfgs_minimize(rosenbrock, {-1.2, 1.0}, exhaustive(500));
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
    EXPECT_NEAR(r.x[1], 1.0, 1e-5);
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
}

TEST(Bfgs, RosenbrockAnalyticGradient) {
    GradientFn grad = [](std::span<const double> p, std::span<double> g) {
        g[0] = -2 * (1 - p[0]) - 400 * p[0] * (p[1] - p[0] * p[0]);
        g[1] = 200 * (p[1] - p[0] * p[0]);
    };
    const auto r = bfgs_minimize(rosenbrock, {-1.2, 1.0}, exhaustive(500), grad);
    EXPECT_NEAR(r.x[0], 1.0, 1e-7);
    EXPECT_NEAR(r.x[1], 1.0, 1e-7);
}

TEST(Bfgs, RandomSpdQuadratics) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    for (int t = 0; t < 10; ++t) {
        Eigen::MatrixXd M(5, 5);
        for (int i = 0; i < 25; ++i) M(i / 5, i % 5) = n01(rng);
        const Eigen::MatrixXd A = M * M.transpose() + Eigen::MatrixXd::Identity(5, 5);
        Eigen::VectorXd b(5);
        for (int i = 0; i < 5; ++i) b(i) = n01(rng);
        const Eigen::VectorXd m = A.ldlt().solve(b);
        auto f = [&](std::span<const double> p) {
            const Eigen::Map<const Eigen::VectorXd> x(p.data(), 5);
            return 0.5 * x.dot(A * x) - b.dot(x);
        };
        const auto r = bfgs_minimize(f, std::vector<double>(5, 0.0), exhaustive(50));
        EXPECT_LE(r.iterations, 50u);
        for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.x[static_cast<std::size_t>(i)], m(i), 1e-8) << "t=" << t;
    }
}

TEST(Bfgs, QuadraticsPastValueResolution) {
    // near the minimum f changes by less than its rounding error; the slope still guides the search
    std::normal_distribution<double> n01;
    for (std::uint64_t seed : {8, 9, 10}) {
        std::mt19937_64 rng(seed);
        for (int t = 0; t < 10; ++t) {
            Eigen::MatrixXd M(5, 5);
            for (int i = 0; i < 25; ++i) M(i / 5, i % 5) = n01(rng);
            const Eigen::MatrixXd A = M * M.transpose() + Eigen::MatrixXd::Identity(5, 5);
            Eigen::VectorXd b(5);
            for (int i = 0; i < 5; ++i) b(i) = n01(rng);
            const Eigen::VectorXd m = A.ldlt().solve(b);
            auto f = [&](std::span<const double> p) {
                const Eigen::Map<const Eigen::VectorXd> x(p.data(), 5);
                return 0.5 * x.dot(A * x) - b.dot(x);
            };
            GradientFn grad = [&](std::span<const double> p, std::span<double> g) {
                const Eigen::Map<const Eigen::VectorXd> x(p.data(), 5);
                Eigen::Map<Eigen::VectorXd>(g.data(), 5) = A * x - b;
            };
            const auto fd = bfgs_minimize(f, std::vector<double>(5, 0.0), exhaustive(100));
            const auto an = bfgs_minimize(f, std::vector<double>(5, 0.0), exhaustive(100), grad);
            EXPECT_EQ(an.termination, "gradient_converged");
            for (const auto* r : {&fd, &an})
                for (std::size_t i = 1; i < r->trace.size(); ++i) EXPECT_LE(r->trace[i], r->trace[i - 1]);
            for (int i = 0; i < 5; ++i) {
                const auto k = static_cast<std::size_t>(i);
                EXPECT_NEAR(fd.x[k], m(i), 1e-8) << "seed " << seed << " t=" << t;
                EXPECT_NEAR(an.x[k], m(i), 1e-10) << "seed " << seed << " t=" << t;
            }
        }
    }
}

TEST(Bfgs, ContractsAndTermination) {
    auto nan_at_zero = [](std::span<const double> p) { return p[0] == 0.0 ? std::nan("") : p[0] * p[0]; };
    EXPECT_THROW(bfgs_minimize(nan_at_zero, {0.0}), ContractError);
    EXPECT_THROW(bfgs_minimize(rosenbrock, {}), ContractError);

    auto sq = [](std::span<const double> p) { return p[0] * p[0] + p[1] * p[1]; };
    BfgsOptions o;
    o.target_loss = 1e-3;
    EXPECT_EQ(bfgs_minimize(sq, {1.0, 1.0}, o).termination, "target_reached");
    EXPECT_EQ(bfgs_minimize(rosenbrock, {-1.2, 1.0}, exhaustive(1)).termination, "max_iterations");
    // a flat objective has zero gradient
    EXPECT_EQ(bfgs_minimize([](std::span<const double>) { return 1.0; }, {0.5}, exhaustive(10)).termination,
              "gradient_converged");
}

TEST(Bfgs, WorkersDoNotChangeResult) {
    BfgsOptions a = exhaustive(40), b = a;
    b.workers = 3;
    const auto ra = bfgs_minimize(rosenbrock, {-1.2, 1.0}, a);
    const auto rb = bfgs_minimize(rosenbrock, {-1.2, 1.0}, b);
    EXPECT_EQ(ra.x, rb.x);
    EXPECT_EQ(ra.trace, rb.trace);
}

TEST(InitParams, CountAndRanges) {
    const auto sys = load("coupled_linear.hde");
    SolverConfig cfg;
    cfg.qubits = 4;
    cfg.depth = 3;
    const auto p = init_params(sys, cfg, 7);
    ASSERT_EQ(p.size(), 26u);
    for (std::size_t f = 0; f < 2; ++f) {
        for (std::size_t i = 0; i < 12; ++i) {
            EXPECT_GE(p[f * 13 + i], 0.0);
            EXPECT_LT(p[f * 13 + i], 2 * std::numbers::pi);
        }
        EXPECT_GE(p[f * 13 + 12], 0.0);
        EXPECT_LE(p[f * 13 + 12], std::log(10.0));
    }
    EXPECT_EQ(init_params(sys, cfg, 7), p);
    EXPECT_NE(init_params(sys, cfg, 8), p);
}

TEST(InitParams, CountFollowsPerFunctionSettings) {
    const auto sys = load("hypoelastic.hde");
    SolverConfig cfg;
    cfg.qubits = 5;
    cfg.depth = 2;
    cfg.per_function["u"].qubits = 3;
    cfg.per_function["s"].depth = 4;
    // u: 3*2 + 1, s: 5*4 + 1
    EXPECT_EQ(init_params(sys, cfg, 1).size(), 28u);
    EXPECT_EQ(make_loss_engine(sys, cfg).parameter_count(), 28u);
    cfg.per_function["u"].qubits_per_variable = {4};
    EXPECT_EQ(init_params(sys, cfg, 1).size(), 32u);
}

TEST(SolverConfigType, Validation) {
    SolverConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.qubits = 1;
    EXPECT_THROW(cfg.validate(), ContractError);
    cfg = {};
    cfg.max_iterations = 0;
    EXPECT_THROW(cfg.validate(), ContractError);
    cfg = {};
    cfg.target_loss = 0.0;
    EXPECT_THROW(cfg.validate(), ContractError);
}

TEST(ConfigFromProblem, ReadsOptions) {
    const auto cfg = config_from_problem(load("damped_oscillator.hde"));
    EXPECT_EQ(cfg.qubits, 5);
    EXPECT_EQ(cfg.depth, 5);
    EXPECT_EQ(cfg.samples, 20u);
    EXPECT_EQ(cfg.max_iterations, 525u);
    EXPECT_EQ(cfg.strategy, BoundaryStrategy::Tangential);
}

TEST(Solve, TrivialConstant) {
    const auto sys = parse_problem("var x in [0,0.95]; fun f(x); eq: f - 1 = 0;");
    SolverConfig cfg;
    cfg.qubits = 2;
    cfg.target_loss = 1e-12;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        cfg.seed = seed;
        const auto r = solve(sys, cfg);
        EXPECT_LE(r.final_loss, 1e-8);
        for (const auto& t : r.functions[0].expansion.terms()) {
            const double expected = t.orders[0] == 0 ? 1.0 : 0.0;
            EXPECT_NEAR(t.coefficient, expected, 1e-3) << "seed " << seed << " order " << t.orders[0];
        }
    }
}

TEST(Solve, TrivialConstantLargerRegister) {
    // on [0, 0.95] many degree-7 series are close to 1, so only the loss is pinned down
    const auto sys = parse_problem("var x in [0,0.95]; fun f(x); eq: f - 1 = 0;");
    SolverConfig cfg;
    cfg.qubits = 4;
    cfg.target_loss = 1e-12;
    cfg.max_iterations = 1000;
    cfg.seed = 2;
    EXPECT_LE(solve(sys, cfg).final_loss, 1e-8);
}

TEST(Solve, SingleIteration) {
    const auto sys = load("coupled_linear.hde");
    auto cfg = config_from_problem(sys);
    cfg.max_iterations = 1;
    const auto r = solve(sys, cfg);
    EXPECT_EQ(r.termination, "max_iterations");
    EXPECT_EQ(r.iterations, 1u);
    EXPECT_EQ(r.loss_trace.size(), 2u);
}

TEST(Solve, ReproducibleAndConsistent) {
    const auto sys = load("coupled_linear.hde");
    auto cfg = config_from_problem(sys);
    cfg.max_iterations = 40;
    cfg.seed = 11;
    const auto a = solve(sys, cfg);
    const auto b = solve(sys, cfg);
    EXPECT_EQ(a.parameters, b.parameters);
    EXPECT_EQ(a.loss_trace, b.loss_trace);
    EXPECT_EQ(a.final_loss, b.final_loss);

    cfg.workers = 2;
    const auto c = solve(sys, cfg);
    EXPECT_EQ(a.parameters, c.parameters);

    for (std::size_t i = 1; i < a.loss_trace.size(); ++i) EXPECT_LE(a.loss_trace[i], a.loss_trace[i - 1]);
    EXPECT_EQ(a.loss_trace.back(), a.final_loss);

    const auto engine = make_loss_engine(sys, cfg);
    EXPECT_NEAR(engine(a.parameters), a.final_loss, 1e-12);
    EXPECT_EQ(a.parameters.size(), 26u);
    EXPECT_EQ(a.functions.size(), 2u);
    EXPECT_EQ(a.functions[0].orders, (std::set<MultiIndex>{MultiIndex({0}), MultiIndex({1})}));
}

TEST(Solve, ShotModeIsSeedReproducible) {
    const auto sys = load("coupled_linear.hde");
    auto cfg = config_from_problem(sys);
    cfg.max_iterations = 5;
    cfg.shots = 4096;
    cfg.seed = 4;
    const auto a = solve(sys, cfg);
    const auto b = solve(sys, cfg);
    EXPECT_EQ(a.parameters, b.parameters);
    EXPECT_TRUE(std::isfinite(a.final_loss));
}

TEST(Gradient, FiniteDifferenceAgreesWithRichardson) {
    const auto sys = load("coupled_linear.hde");
    const auto cfg = config_from_problem(sys);
    const auto engine = make_loss_engine(sys, cfg);
    const Objective f = [&](std::span<const double> p) { return engine(p); };
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = init_params(sys, cfg, seed);
        const auto g7 = central_difference_gradient(f, p, 1e-7);
        const auto g5 = central_difference_gradient(f, p, 1e-5);
        const auto g5b = central_difference_gradient(f, p, 2e-5);
        double scale = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) scale = std::max(scale, std::fabs(g5[i]));
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double rich = (4 * g5[i] - g5b[i]) / 3;
            EXPECT_LE(std::fabs(g7[i] - rich), 1e-4 * std::max(std::fabs(rich), 1e-3 * scale))
                << "seed " << seed << " component " << i;
        }
    }
}

TEST(MultiStart, SingleRestartEqualsSolve) {
    const auto sys = load("coupled_linear.hde");
    auto cfg = config_from_problem(sys);
    cfg.max_iterations = 20;
    cfg.seed = 5;
    const auto single = solve(sys, cfg);
    const auto ms = multi_start(sys, cfg, 1);
    ASSERT_EQ(ms.runs.size(), 1u);
    EXPECT_EQ(ms.runs[0].parameters, single.parameters);
    EXPECT_EQ(ms.summary.best_loss, single.final_loss);
    EXPECT_EQ(ms.summary.median_loss, single.final_loss);
    EXPECT_EQ(ms.summary.mean_loss, single.final_loss);
    for (std::size_t f = 0; f < 2; ++f) {
        const auto solved = single.functions[f].solved();
        for (std::size_t s = 0; s < ms.summary.samples.size(); ++s) {
            EXPECT_EQ(ms.summary.stddev[f][s], 0.0);
            EXPECT_NEAR(ms.summary.mean[f][s], solved.evaluate(ms.summary.samples[s]), 1e-15);
        }
    }
}

TEST(MultiStart, ReproducibleSummaries) {
    const auto sys = load("coupled_linear.hde");
    auto cfg = config_from_problem(sys);
    cfg.max_iterations = 10;
    const auto a = multi_start(sys, cfg, 3);
    const auto b = multi_start(sys, cfg, 3);
    EXPECT_EQ(a.summary.final_losses, b.summary.final_losses);
    EXPECT_EQ(a.summary.mean, b.summary.mean);
    EXPECT_EQ(a.summary.stddev, b.summary.stddev);
    for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(a.runs[r].seed, cfg.seed + r);
    const auto& fl = a.summary.final_losses;
    EXPECT_EQ(a.summary.best_loss, *std::min_element(fl.begin(), fl.end()));
    EXPECT_EQ(a.summary.best_loss, fl[a.summary.best_index]);
    EXPECT_THROW(multi_start(sys, cfg, 0), ContractError);
}
