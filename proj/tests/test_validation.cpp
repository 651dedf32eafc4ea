#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "hdes/error.hpp"
#include "hdes/numeric.hpp"
#include "hdes/parser.hpp"
#include "hdes/profile.hpp"
#include "hdes/reference.hpp"
#include "hdes/rk4.hpp"
#include "hdes/samples.hpp"
#include "hdes/validation.hpp"

using namespace hdes;

namespace {

DESystem load(const std::string& name) { return parse_problem_file(std::string(HDES_PROBLEM_DIR) + "/" + name); }

std::vector<Point> grid(std::size_t n, double lo = 0.0, double hi = 1.0) { return generate_samples(n, Box{{lo, hi}}); }

Field constant(double c) {
    return [c](std::span<const double>) { return c; };
}

SolvedFunction zero_function(const std::string& name = "f") { return {name, {"x"}, SpectralExpansion(1, {}), {}}; }

ReferenceFunction reference(std::set<MultiIndex> orders, FieldEvaluator eval) {
    return {"f", std::move(orders), std::move(eval)};
}

double ref_at(const ReferenceSolution& ref, const std::string& fn, double x, int q = 0) {
    return ref.find(fn)->eval(std::vector<double>{x}, MultiIndex({q}));
}

}  // namespace

TEST(Distances, Examples) {
    const auto sv = grid(17);
    const Field id = [](std::span<const double> x) { return x[0]; };
    const Field shifted = [](std::span<const double> x) { return x[0] + 0.1; };
    const Field sq = [](std::span<const double> x) { return x[0] * x[0]; };
    EXPECT_EQ(distance_max(id, id, sv), 0.0);
    EXPECT_EQ(distance_mse(id, id, sv), 0.0);
    EXPECT_NEAR(distance_max(id, shifted, sv), 0.1, 1e-15);
    EXPECT_NEAR(distance_mse(id, shifted, sv), 0.01, 1e-15);
    EXPECT_NEAR(distance_max(id, sq, grid(3)), 0.25, 1e-15);

    const std::vector<Point> two{{0.0}, {1.0}};
    const Field offsets = [](std::span<const double> x) { return x[0] == 0.0 ? 0.1 : 0.3; };
    EXPECT_NEAR(distance_mse(constant(0.0), offsets, two), 0.05, 1e-15);
    EXPECT_THROW(distance_max(id, id, std::vector<Point>{}), ContractError);
}

TEST(Distances, MseInvariantUnderResizing) {
    for (std::size_t n : {7u, 50u, 100u, 333u}) {
        EXPECT_NEAR(distance_mse(constant(1.0), constant(1.25), grid(n)), 0.0625, 1e-15);
        EXPECT_NEAR(distance_max(constant(1.0), constant(1.25), grid(n)), 0.25, 1e-15);
    }
}

TEST(ScoreLevels, Examples) {
    const std::vector<Point> sv{{0.0}, {1.0}};
    const auto f = zero_function();
    const auto exact = reference({MultiIndex({0}), MultiIndex({1})},
                                 [](std::span<const double>, const MultiIndex&) { return 0.0; });
    const auto zero = score_levels(f, exact, {MultiIndex({0}), MultiIndex({1})}, sv);
    EXPECT_EQ(zero.vf.first, 0.0);
    EXPECT_EQ(zero.vf.second, 0.0);
    EXPECT_EQ(zero.vf.level, ScoreLevel::Function);

    // V_{f,0} = (0.1, 0.01), V_{f,1} = (0.2, 0.03)
    const auto ref = reference({MultiIndex({0}), MultiIndex({1})}, [](std::span<const double> x, const MultiIndex& mi) {
        if (mi.is_zero()) return 0.1;
        return x[0] == 0.0 ? 0.2 : std::sqrt(0.02);
    });
    const auto s = score_levels(f, ref, {MultiIndex({0}), MultiIndex({1})}, sv);
    EXPECT_NEAR(s.per_order.at(MultiIndex({0})).first, 0.1, 1e-15);
    EXPECT_NEAR(s.per_order.at(MultiIndex({0})).second, 0.01, 1e-15);
    EXPECT_NEAR(s.per_order.at(MultiIndex({1})).first, 0.2, 1e-15);
    EXPECT_NEAR(s.per_order.at(MultiIndex({1})).second, 0.03, 1e-15);
    EXPECT_NEAR(s.vf.first, 0.2, 1e-15);
    EXPECT_NEAR(s.vf.second, 0.02, 1e-15);
    for (const auto& [mi, v] : s.per_order) EXPECT_GE(s.vf.first, v.first);

    const auto single = score_levels(f, ref, {MultiIndex({0})}, sv);
    EXPECT_EQ(single.vf.first, single.per_order.at(MultiIndex({0})).first);
    EXPECT_EQ(single.vf.second, single.per_order.at(MultiIndex({0})).second);

    const auto values_only = reference({MultiIndex({0})}, [](std::span<const double>, const MultiIndex&) { return 0.0; });
    EXPECT_THROW(score_levels(f, values_only, {MultiIndex({0}), MultiIndex({1})}, sv), ContractError);
}

TEST(ScoreGlobal, Examples) {
    const std::vector<ValidationScore> one{{0.3, 0.02, ScoreLevel::Function}};
    const auto v1 = score_global(one);
    EXPECT_EQ(v1.first, 0.3);
    EXPECT_EQ(v1.second, 0.02);
    EXPECT_EQ(v1.level, ScoreLevel::Global);

    const std::vector<ValidationScore> two{{0.1, 0.01, ScoreLevel::Function}, {0.4, 0.03, ScoreLevel::Function}};
    const auto v2 = score_global(two);
    EXPECT_NEAR(v2.first, 0.4, 1e-15);
    EXPECT_NEAR(v2.second, 0.02, 1e-15);

    const std::vector<ValidationScore> zeros(3);
    EXPECT_EQ(score_global(zeros).first, 0.0);
    EXPECT_EQ(score_global(zeros).second, 0.0);
}

TEST(ScoreSolution, ClosedFormReference) {
    // f = 2x - 3 against a reference with a constant offset in its derivative
    const SolvedFunction f{"f", {"x"}, SpectralExpansion(1, {{{0}, -3.0}, {{1}, 2.0}}), {}};
    ReferenceSolution ref;
    ref.functions.push_back({"f", {MultiIndex({0}), MultiIndex({1})},
                             [](std::span<const double> x, const MultiIndex& mi) {
                                 return mi.is_zero() ? 2 * x[0] - 3 : 2.5;
                             }});
    const std::vector<ScoredFunction> fns{{f, {MultiIndex({0}), MultiIndex({1})}}};
    const auto s = score_solution(fns, ref, grid(100, 0.0, 0.95));
    EXPECT_NEAR(s.functions[0].per_order.at(MultiIndex({0})).first, 0.0, 1e-14);
    EXPECT_NEAR(s.global.first, 0.5, 1e-14);
    EXPECT_NEAR(s.global.second, 0.125, 1e-14);

    ReferenceSolution empty;
    EXPECT_THROW(score_solution(fns, empty, grid(10)), ContractError);
}

TEST(Rk4, Exponential) {
    const OdeRhs rhs = [](double, std::span<const double> y) { return std::vector<double>{y[0]}; };
    const Rk4Trajectory traj(rhs, 0.0, {1.0}, 1.0, 1e-3);
    EXPECT_EQ(traj.steps(), 1000u);
    EXPECT_NEAR(traj.final_state()[0], std::exp(1.0), 1e-6);
    // dense output between grid nodes
    EXPECT_NEAR(traj.state(0.12345)[0], std::exp(0.12345), 1e-9);
    EXPECT_NEAR(traj.rhs(0.5)[0], std::exp(0.5), 1e-9);
}

TEST(Rk4, FourthOrderConvergence) {
    const OdeRhs rhs = [](double, std::span<const double> y) { return std::vector<double>{y[0]}; };
    const double e1 = std::fabs(Rk4Trajectory(rhs, 0.0, {1.0}, 1.0, 0.1).final_state()[0] - std::exp(1.0));
    const double e2 = std::fabs(Rk4Trajectory(rhs, 0.0, {1.0}, 1.0, 0.05).final_state()[0] - std::exp(1.0));
    const double ratio = e1 / e2;
    EXPECT_GT(ratio, 8.0);
    EXPECT_LT(ratio, 32.0);
}

TEST(Rk4Reference, CoupledSystem) {
    const auto ref = rk4_reference(load("coupled_linear.hde"));
    EXPECT_EQ(ref.kind, ReferenceKind::Rk4);
    for (double x : linspace(0.0, 0.95, 37)) {
        EXPECT_NEAR(ref_at(ref, "f", x), 5 * x, 1e-8);
        EXPECT_NEAR(ref_at(ref, "g", x), 5 * x + 2.5 * x * x, 1e-8);
        EXPECT_NEAR(ref_at(ref, "f", x, 1), 5.0, 1e-8);
        EXPECT_NEAR(ref_at(ref, "g", x, 1), 5 + 5 * x, 1e-8);
    }
    EXPECT_TRUE(ref.find("g")->supports(MultiIndex({2})));
    EXPECT_NEAR(ref_at(ref, "g", 0.4, 2), 5.0, 1e-6);
}

TEST(Rk4Reference, HypoelasticStressByShooting) {
    const auto ref = rk4_reference(load("hypoelastic.hde"));
    for (double x : linspace(0.0, 0.95, 20)) {
        EXPECT_NEAR(ref_at(ref, "s", x), 2 + 10 * (0.9 - x), 1e-8);
        EXPECT_NEAR(ref_at(ref, "s", x, 1), -10.0, 1e-8);
    }
    // u' follows the constitutive law pointwise and u(0) = 0
    EXPECT_NEAR(ref_at(ref, "u", 0.0), 0.0, 1e-12);
    const double s = 2 + 10 * 0.9 - 10 * 0.3;
    EXPECT_NEAR(ref_at(ref, "u", 0.3, 1),
                s / 300 + 2 * 0.1 / std::sqrt(3.0) * std::pow(s / (std::sqrt(3.0) * 5), 4), 1e-8);
}

TEST(Rk4Reference, DampedOscillatorMatchesClosedForm) {
    const double w = 9.0 / 8.0, z = 45.0 / 8.0;
    const double r1 = -z * w + w * std::sqrt(z * z - 1), r2 = -z * w - w * std::sqrt(z * z - 1);
    const double A = -2 * r2 / (r1 - r2), B = 2 * r1 / (r1 - r2);
    const auto ref = rk4_reference(load("damped_oscillator.hde"));
    for (double t : linspace(0.0, 0.95, 20)) {
        EXPECT_NEAR(ref_at(ref, "x", t), A * std::exp(r1 * t) + B * std::exp(r2 * t), 1e-9);
        EXPECT_NEAR(ref_at(ref, "x", t, 1), A * r1 * std::exp(r1 * t) + B * r2 * std::exp(r2 * t), 1e-8);
        EXPECT_NEAR(ref_at(ref, "x", t, 2), A * r1 * r1 * std::exp(r1 * t) + B * r2 * r2 * std::exp(r2 * t), 1e-7);
    }
}

TEST(Rk4Reference, RejectsUnsupportedSystems) {
    EXPECT_THROW(rk4_reference(parse_problem("var x in [0,1]; var y in [0,1]; fun u(x,y); eq: D(u,x) - u = 0;")),
                 ContractError);
    // no condition for f
    EXPECT_THROW(rk4_reference(parse_problem("var x in [0,1]; fun f(x); eq: D(f,x) - f = 0;")), ContractError);
}

TEST(TabulatedReference, LookupAndInterpolation) {
    const std::string csv = "x,f,f_d1\n0,1,2\n0.5,2,2\n1,3,2\n";
    const auto ref = tabulated_reference(csv, {"x"});
    EXPECT_EQ(ref.kind, ReferenceKind::Tabulated);
    EXPECT_EQ(ref_at(ref, "f", 0.5), 2.0);
    EXPECT_NEAR(ref_at(ref, "f", 0.25), 1.5, 1e-15);
    EXPECT_EQ(ref_at(ref, "f", 1.0, 1), 2.0);
    EXPECT_FALSE(ref.find("f")->supports(MultiIndex({2})));
    EXPECT_EQ(ref.find("g"), nullptr);
    EXPECT_EQ(column_name("g", MultiIndex({1, 0})), "g_d1_0");
    EXPECT_EQ(column_name("f", MultiIndex({0})), "f");
    EXPECT_THROW(tabulated_reference("x,f\n0,1,2\n", {"x"}), ContractError);
    EXPECT_THROW(tabulated_reference("y,f\n0,1\n", {"x"}), ContractError);
}

TEST(PerformanceRatios, Examples) {
    const auto r = performance_ratios({{1e-3, 2e-3}});
    EXPECT_DOUBLE_EQ(r[0][0], 1.0);
    EXPECT_DOUBLE_EQ(r[0][1], 2.0);

    ProfileOptions opt;
    const auto fail = performance_ratios({{1e-3, 0.5}}, opt);
    EXPECT_EQ(fail[0][1], opt.r_max);

    const auto zero = performance_ratios({{0.0, 1e-3, 0.0}});
    EXPECT_EQ(zero[0], (std::vector<double>{1.0, opt.r_max, 1.0}));

    // ratios never exceed r_max
    const auto clamp = performance_ratios({{1e-12, 1e-2}});
    EXPECT_EQ(clamp[0][1], opt.r_max);
}

TEST(PerformanceProfile, Properties) {
    EXPECT_EQ(rho(std::vector<double>{1, 1, 1}, 1.0), 1.0);
    const std::vector<double> failing{1.0, 2.0, 1e6, 1e6, 3.0};
    EXPECT_DOUBLE_EQ(success_fraction(failing, 1e6), 3.0 / 5.0);
    EXPECT_DOUBLE_EQ(rho(failing, 1e6), 1.0);
    EXPECT_DOUBLE_EQ(rho(failing, std::nextafter(1e6, 0.0)), 3.0 / 5.0);

    const auto taus = tau_grid(1e6, 50);
    ASSERT_EQ(taus.size(), 50u);
    EXPECT_EQ(taus.front(), 1.0);
    EXPECT_EQ(taus.back(), 1e6);
    for (std::size_t i = 1; i < taus.size(); ++i) EXPECT_GT(taus[i], taus[i - 1]);
    EXPECT_THROW(performance_profiles({}, {"a"}, taus), ContractError);
}

TEST(PerformanceProfile, TiesCountForAllSolvers) {
    const std::vector<std::vector<double>> scores{{1e-3, 1e-3}, {2e-3, 2e-3}};
    const auto taus = tau_grid(1e6, 20);
    const auto curves = performance_profiles(scores, {"a", "b"}, taus);
    for (const auto& c : curves)
        for (double v : c.rho) EXPECT_EQ(v, 1.0);
}

TEST(PerformanceProfile, SyntheticTable) {
    // 5 problems x 3 solvers; solver c fails everywhere, b fails once
    const std::vector<std::vector<double>> scores{
        {1e-3, 2e-3, 0.1}, {4e-3, 1e-3, 0.2}, {1e-2, 1e-1, 0.3}, {2e-4, 2e-4, 0.06}, {0.0, 5e-3, 0.07}};
    ProfileOptions opt;
    const auto r = performance_ratios(scores, opt);
    for (std::size_t p = 0; p < 5; ++p) EXPECT_EQ(r[p][2], opt.r_max);
    EXPECT_EQ(r[2][1], opt.r_max);
    EXPECT_EQ(r[4][0], 1.0);
    EXPECT_EQ(r[4][1], opt.r_max);
    const auto taus = tau_grid(opt.r_max, 100);
    const auto curves = performance_profiles(scores, {"a", "b", "c"}, taus, opt);
    ASSERT_EQ(curves.size(), 3u);
    double at_one = 0;
    for (const auto& c : curves) {
        for (std::size_t i = 1; i < c.rho.size(); ++i) EXPECT_GE(c.rho[i], c.rho[i - 1]);
        for (double v : c.rho) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        EXPECT_EQ(c.rho.back(), 1.0);
        at_one += c.rho.front();
    }
    EXPECT_GE(at_one, 1.0);
    for (std::size_t i = 0; i + 1 < taus.size(); ++i) EXPECT_EQ(curves[2].rho[i], 0.0);
    std::vector<double> col_b;
    for (const auto& row : r) col_b.push_back(row[1]);
    EXPECT_DOUBLE_EQ(success_fraction(col_b, opt.r_max), 3.0 / 5.0);
}
