#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>

#include "hdes/error.hpp"
#include "hdes/expr.hpp"
#include "hdes/parser.hpp"
#include "hdes/system.hpp"

using namespace hdes;

namespace {

const std::string kCoupled = "var x in [0,0.95]; fun f(x); fun g(x);\n"
                             "eq: D(f,x) - 5 = 0;\n"
                             "eq: D(g,x) - f - 5 = 0;\n"
                             "bc: f(0) = 0; bc: g(0) = 0;\n";

DESystem load(const std::string& name) { return parse_problem_file(std::string(HDES_PROBLEM_DIR) + "/" + name); }

std::set<MultiIndex> orders_of(const DESystem& sys, const std::string& fn) {
    return derivative_orders(sys).at(sys.function_index(fn));
}

// Collects (function, order) pairs by visiting every node.
void enumerate(const Expr& e, std::set<std::pair<std::size_t, MultiIndex>>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FunctionNode>) out.insert({n.function, n.order});
            else if constexpr (std::is_same_v<T, NegateNode>) enumerate(*n.operand, out);
            else if constexpr (std::is_same_v<T, BinaryNode>) {
                enumerate(*n.lhs, out);
                enumerate(*n.rhs, out);
            } else if constexpr (std::is_same_v<T, CallNode>) enumerate(*n.arg, out);
        },
        e.node);
}

std::string parse_error_of(const std::string& text) {
    try {
        parse_problem(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ParseProblem, CoupledSystem) {
    const auto sys = parse_problem("var x in [0,0.95]; fun f(x); eq: D(f,x) - 5 = 0; bc: f(0) = 0;");
    ASSERT_EQ(sys.equations.size(), 1u);
    ASSERT_EQ(sys.boundary_conditions.size(), 1u);
    EXPECT_EQ(sys.variables[0].domain.lo, 0.0);
    EXPECT_EQ(sys.variables[0].domain.hi, 0.95);
    EXPECT_EQ(orders_of(sys, "f"), std::set<MultiIndex>{MultiIndex({1})});
    EXPECT_TRUE(sys.boundary_conditions[0].is_value());

    const auto two = parse_problem(kCoupled);
    EXPECT_EQ(orders_of(two, "f"), (std::set<MultiIndex>{MultiIndex({0}), MultiIndex({1})}));
    EXPECT_EQ(orders_of(two, "g"), std::set<MultiIndex>{MultiIndex({1})});
}

TEST(ParseProblem, UnknownIdentifier) {
    const auto msg = parse_error_of("var x in [0,1];\neq: D(f,x) = 0;");
    EXPECT_NE(msg.find("2:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("unknown function 'f'"), std::string::npos) << msg;
    EXPECT_EQ(parse_error_of("var x in [0,1]; fun f(x);\neq: f + y = 0;"), "2:9: unknown identifier 'y'");
}

TEST(ParseProblem, Errors) {
    EXPECT_NE(parse_error_of("var x in [0,1]; fun f(x); eq: f - 1 = 0; bc: f(2) = 0;").find("outside the domain"),
              std::string::npos);
    EXPECT_NE(parse_error_of("var x in [0,1]; var y in [0,1]; fun f(x,y); eq: f = 0; bc: f(0) = 0;")
                  .find("takes 2 argument(s), got 1"),
              std::string::npos);
    EXPECT_NE(parse_error_of("var x in [0,1]; fun f(x); eq: f - 1 = 2;").find("must be 0"), std::string::npos);
    EXPECT_NE(parse_error_of("var x in [0,1]; fun f(x); eq: f^x = 0;").find("exponent"), std::string::npos);
    EXPECT_NE(parse_error_of("var x in [0,1]; fun f(x); eq: f $ 1 = 0;").find("unexpected character"),
              std::string::npos);
    EXPECT_NE(parse_error_of("var x in [0,1]; fun f(x);").find("no equations"), std::string::npos);
    EXPECT_NE(parse_error_of("var x in [0,1]; fun f(x); fun g(x); eq: f = 0;").find("'g' does not appear"),
              std::string::npos);
    EXPECT_NE(parse_error_of("var sin in [0,1];").find("reserved"), std::string::npos);
    EXPECT_NE(parse_error_of("var x in [0,1]; fun f(x); eq: f = 0; option qubits = 4; option qubits = 5;")
                  .find("set twice"),
              std::string::npos);
}

TEST(ParseProblem, Grammar) {
    const auto sys = parse_problem(
        "# comment line\n"
        "param a = 3/4; param b = -2e-1;\n"
        "var t in [-1, 1];\n"
        "fun y(t);\n"
        "eq: D(y, t, 2) + a*D(y,t) - b*y^2^1 + sin(t)*exp(-t) - sqrt(4)/cos(0) = 0;  # trailing\n"
        "bc: y(-1) = 1/2;\n"
        "bc: D(y, t)(1) = 0;\n"
        "option strategy = tangential;\n");
    EXPECT_DOUBLE_EQ(sys.parameters[0].value, 0.75);
    EXPECT_DOUBLE_EQ(sys.parameters[1].value, -0.2);
    EXPECT_EQ(orders_of(sys, "y"), (std::set<MultiIndex>{MultiIndex({0}), MultiIndex({1}), MultiIndex({2})}));
    EXPECT_DOUBLE_EQ(sys.boundary_conditions[0].value, 0.5);
    EXPECT_EQ(sys.boundary_conditions[1].order, MultiIndex({1}));
    EXPECT_EQ(sys.boundary_conditions[1].point, Point{1.0});
    ASSERT_NE(sys.option("strategy"), nullptr);
    EXPECT_EQ(sys.option("strategy")->word, "tangential");
}

TEST(ParseProblem, PowerIsRightAssociative) {
    const auto sys = parse_problem("var x in [0,1]; fun f(x); eq: f - 2^3^2 = 0;");
    Bindings b(sys.slots);
    b.set(0, MultiIndex({0}), 0.0);
    EXPECT_DOUBLE_EQ(evaluate_residual(*sys.equations[0].expr, b, std::vector<double>{0.5}), -512.0);
}

TEST(DerivativeOrders, ProblemFiles) {
    const auto osc = load("damped_oscillator.hde");
    EXPECT_EQ(orders_of(osc, "x"), (std::set<MultiIndex>{MultiIndex({0}), MultiIndex({1}), MultiIndex({2})}));

    const auto hyp = load("hypoelastic.hde");
    EXPECT_EQ(orders_of(hyp, "u"), std::set<MultiIndex>{MultiIndex({1})});
    EXPECT_EQ(orders_of(hyp, "s"), (std::set<MultiIndex>{MultiIndex({0}), MultiIndex({1})}));

    const auto single = parse_problem("var x in [0,1]; fun f(x); eq: f - 5 = 0;");
    EXPECT_EQ(orders_of(single, "f"), std::set<MultiIndex>{MultiIndex({0})});
}

TEST(DerivativeOrders, MatchBruteForceEnumeration) {
    const std::vector<std::string> texts = {
        kCoupled,
        "var x in [0,1]; var y in [0,2]; fun u(x,y); fun w(y);\n"
        "eq: D(u,x,2) + D(u,y,2) - u*w = 0;\n"
        "eq: D(u,x,y) + D(w,y) - sin(x*y) = 0;\n",
    };
    std::vector<DESystem> systems;
    for (const auto& t : texts) systems.push_back(parse_problem(t));
    for (const auto* name : {"coupled_linear.hde", "damped_oscillator.hde", "hypoelastic.hde"}) systems.push_back(load(name));
    for (const auto& sys : systems) {
        std::set<std::pair<std::size_t, MultiIndex>> seen;
        for (const auto& eq : sys.equations) enumerate(*eq.expr, seen);
        std::vector<std::set<MultiIndex>> brute(sys.functions.size());
        for (const auto& [f, mi] : seen) brute[f].insert(mi);
        EXPECT_EQ(derivative_orders(sys), brute);
        for (const auto& g : brute) EXPECT_FALSE(g.empty());
    }
}

TEST(DerivativeOrders, MixedPartial) {
    const auto sys = parse_problem("var x in [0,1]; var y in [0,2]; fun u(x,y); eq: D(u,x,y) - D(u,y,2) = 0;");
    EXPECT_EQ(orders_of(sys, "u"), (std::set<MultiIndex>{MultiIndex({1, 1}), MultiIndex({0, 2})}));
}

TEST(EvaluateResidual, Examples) {
    const auto sys = parse_problem("var x in [0,0.95]; fun f(x); eq: D(f,x) - 5 = 0; eq: f^2 = 0;");
    Bindings b(sys.slots);
    b.set(0, MultiIndex({1}), 5.0);
    b.set(0, MultiIndex({0}), -3.0);
    EXPECT_EQ(evaluate_residual(*sys.equations[0].expr, b, std::vector<double>{0.3}), 0.0);
    EXPECT_DOUBLE_EQ(evaluate_residual(*sys.equations[1].expr, b, std::vector<double>{0.3}), 9.0);
}

TEST(EvaluateResidual, HypoelasticConstitutiveRelation) {
    const auto sys = load("hypoelastic.hde");
    const double sigma = 2.0;
    const double strain_rate =
        sigma / (3 * 100.0) + 2 * 0.1 / std::sqrt(3.0) * std::pow(sigma / (std::sqrt(3.0) * 5.0), 4);
    Bindings b(sys.slots);
    b.set(sys.function_index("u"), MultiIndex({1}), strain_rate);
    b.set(sys.function_index("s"), MultiIndex({0}), sigma);
    EXPECT_NEAR(evaluate_residual(*sys.equations[0].expr, b, std::vector<double>{0.4}), 0.0, 1e-15);
}

TEST(EvaluateResidual, Errors) {
    const auto sys = parse_problem("var x in [0,1]; fun f(x); eq: 1/f + D(f,x) = 0;");
    Bindings b(sys.slots);
    b.set(0, MultiIndex({0}), 2.0);
    EXPECT_THROW(evaluate_residual(*sys.equations[0].expr, b, std::vector<double>{0.1}), ContractError);
    b.set(0, MultiIndex({1}), 1.0);
    EXPECT_DOUBLE_EQ(evaluate_residual(*sys.equations[0].expr, b, std::vector<double>{0.1}), 1.5);
    b.set(0, MultiIndex({0}), 0.0);
    EXPECT_THROW(evaluate_residual(*sys.equations[0].expr, b, std::vector<double>{0.1}), EvaluationError);
}

TEST(EvaluateResidual, RandomPolynomialsMatchHandEvaluation) {
    const auto sys = parse_problem(
        "param a = 1.5; var x in [-1,1]; var y in [0,2]; fun f(x,y); fun g(y);\n"
        "eq: a*f^3 - 2*D(f,x)*g + x*y*D(g,y,2) - (f - g)^2 + 7/4 = 0;\n");
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const std::size_t F = sys.function_index("f"), G = sys.function_index("g");
    for (int t = 0; t < 20; ++t) {
        const double f = u(rng), fx = u(rng), g = u(rng), gyy = u(rng), x = u(rng), y = u(rng);
        Bindings b(sys.slots);
        b.set(F, MultiIndex({0, 0}), f);
        b.set(F, MultiIndex({1, 0}), fx);
        b.set(G, MultiIndex({0}), g);
        b.set(G, MultiIndex({2}), gyy);
        const double hand = 1.5 * f * f * f - 2 * fx * g + x * y * gyy - (f - g) * (f - g) + 1.75;
        EXPECT_NEAR(evaluate_residual(*sys.equations[0].expr, b, std::vector<double>{x, y}), hand, 1e-12);
    }
}

TEST(Linearity, Examples) {
    const auto coupled = parse_problem(kCoupled);
    EXPECT_TRUE(is_linear_single_function(*coupled.equations[0].expr));
    EXPECT_FALSE(is_linear_single_function(*coupled.equations[1].expr));

    const auto hyp = load("hypoelastic.hde");
    EXPECT_FALSE(is_linear_single_function(*hyp.equations[0].expr));
    EXPECT_TRUE(is_linear_single_function(*hyp.equations[1].expr));

    const auto osc = load("damped_oscillator.hde");
    EXPECT_TRUE(is_linear_single_function(*osc.equations[0].expr));

    const auto misc = parse_problem(
        "var x in [0,1]; fun f(x);\n"
        "eq: sin(x)*D(f,x) + x^2*f - exp(x) = 0;\n"
        "eq: f*D(f,x) = 0;\n"
        "eq: (f + 1)/2 - x = 0;\n"
        "eq: x/f = 0;\n"
        "eq: sqrt(f) = 0;\n"
        "eq: 3 - x = 0;\n");
    EXPECT_TRUE(is_linear_single_function(*misc.equations[0].expr));
    EXPECT_FALSE(is_linear_single_function(*misc.equations[1].expr));
    EXPECT_TRUE(is_linear_single_function(*misc.equations[2].expr));
    EXPECT_FALSE(is_linear_single_function(*misc.equations[3].expr));
    EXPECT_FALSE(is_linear_single_function(*misc.equations[4].expr));
    EXPECT_FALSE(is_linear_single_function(*misc.equations[5].expr));
}

TEST(RoundTrip, PrintAndReparse) {
    std::vector<DESystem> systems{parse_problem(kCoupled),
                                  parse_problem("param c = -1/3; var x in [0,1]; var y in [-1,1]; fun u(x,y);\n"
                                                "eq: D(u,x,2) - c*D(u,x,y) + -u^2 - sin(x)/2 = 0;\n"
                                                "bc: u(0, 0.5) = 1; bc: D(u, y)(1, -1) = 0.25;\n"
                                                "option eta = 2.5; option strategy = penalty;")};
    for (const auto* name : {"coupled_linear.hde", "damped_oscillator.hde", "hypoelastic.hde"}) systems.push_back(load(name));
    for (const auto& sys : systems) {
        const auto text = to_source(sys);
        const auto again = parse_problem(text);
        EXPECT_TRUE(structurally_equal(sys, again)) << text;
        EXPECT_EQ(to_source(again), text);
    }
    EXPECT_FALSE(structurally_equal(parse_problem(kCoupled), load("hypoelastic.hde")));
}

TEST(Tokenize, ColumnsAndNumbers) {
    const auto toks = tokenize("eq: 1.5e2 +\n  x");
    ASSERT_GE(toks.size(), 5u);
    EXPECT_EQ(toks[0].text, "eq");
    EXPECT_EQ(toks[2].kind, TokenKind::Number);
    EXPECT_DOUBLE_EQ(toks[2].number, 150.0);
    EXPECT_EQ(toks[4].loc.line, 2u);
    EXPECT_EQ(toks[4].loc.column, 3u);
}
