#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hdes/expr.hpp"
#include "hdes/multi_index.hpp"
#include "hdes/numeric.hpp"

namespace hdes {

struct Variable {
    std::string name;
    Interval domain;
};

struct Parameter {
    std::string name;
    double value = 0.0;
};

struct FunctionDecl {
    std::string name;
    std::vector<std::size_t> variables;  // indices into DESystem::variables
    SourceLoc loc;
};

/// expr == 0
struct Equation {
    ExprPtr expr;
    SourceLoc loc;
};

struct BoundaryCondition {
    std::size_t function = 0;
    MultiIndex order;  // zero for value conditions
    Point point;       // in the function's own variables
    double value = 0.0;
    SourceLoc loc;

    bool is_value() const { return order.is_zero(); }
};

/// `option key = value;` statement; value is numeric or a bare word.
struct ProblemOption {
    std::string key;
    std::optional<double> number;
    std::string word;
};

struct DESystem {
    std::vector<Parameter> parameters;
    std::vector<Variable> variables;
    std::vector<FunctionDecl> functions;
    std::vector<Equation> equations;
    std::vector<BoundaryCondition> boundary_conditions;
    std::vector<ProblemOption> options;
    /// Every distinct (function, derivative) pair occurring in the equations.
    std::vector<Slot> slots;

    std::size_t function_index(const std::string& name) const;
    std::size_t variable_index(const std::string& name) const;

    /// Domain box of all variables, in declaration order.
    Box domain() const;
    /// Domain box of one function's variables.
    Box function_domain(std::size_t function) const;
    /// Coordinates of `system_point` restricted to the function's variables.
    Point project(std::size_t function, const Point& system_point) const;

    const ProblemOption* option(const std::string& key) const;
};

/// G_F: for each function (by index), the derivative multi-indices occurring in E.
std::vector<std::set<MultiIndex>> derivative_orders(const DESystem& sys);

/// G = union of G_F(f) over all functions.
std::set<MultiIndex> derivative_order_union(const DESystem& sys);

/// Problem text in the .hde grammar; re-parsing yields a structurally equal system.
std::string to_source(const DESystem& sys);

bool structurally_equal(const DESystem& a, const DESystem& b);

}  // namespace hdes
