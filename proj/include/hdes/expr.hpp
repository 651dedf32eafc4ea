#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hdes/multi_index.hpp"

namespace hdes {

struct SourceLoc {
    std::size_t line = 0;
    std::size_t column = 0;
};

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Builtin { Sqrt, Sin, Cos, Exp };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct NumberNode {
    double value = 0.0;
};

struct ParamNode {
    std::string name;
    double value = 0.0;
};

struct VariableNode {
    std::string name;
    std::size_t index = 0;  // into DESystem::variables
};

/// A function value (order zero) or partial derivative, bound through a slot.
struct FunctionNode {
    std::string name;
    std::size_t function = 0;
    MultiIndex order;
    std::size_t slot = 0;
    std::vector<std::string> variables;  // the function's declared variables, for printing
    bool explicit_args = false;          // written as f(x) rather than f
};

struct NegateNode {
    ExprPtr operand;
};

struct BinaryNode {
    BinaryOp op = BinaryOp::Add;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct CallNode {
    Builtin fn = Builtin::Sqrt;
    ExprPtr arg;
};

struct Expr {
    std::variant<NumberNode, ParamNode, VariableNode, FunctionNode, NegateNode, BinaryNode, CallNode> node;
    SourceLoc loc;
};

ExprPtr make_expr(decltype(Expr::node) node, SourceLoc loc = {});

/// (function index, derivative multi-index) pair that an equation needs bound.
struct Slot {
    std::size_t function = 0;
    MultiIndex order;

    auto operator<=>(const Slot&) const = default;
};

/// Values for the slots of a system; unset slots are reported on use.
class Bindings {
public:
    explicit Bindings(std::span<const Slot> slots);

    void set(std::size_t function, const MultiIndex& order, double value);
    void set_slot(std::size_t slot, double value);
    bool is_bound(std::size_t slot) const;
    double get(std::size_t slot) const;
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<Slot> slots_;
    std::vector<double> values_;
    std::vector<bool> bound_;
};

/// Evaluates e with variables bound to x. Throws ContractError for unbound slots and
/// EvaluationError on division by zero or non-finite intermediate results.
double evaluate_residual(const Expr& e, const Bindings& bindings, std::span<const double> x);

/// Same without binding checks; slot_values is indexed by slot.
double evaluate_expr(const Expr& e, std::span<const double> slot_values, std::span<const double> x);

/// True iff e is affine in the values/derivatives of exactly one function, with
/// coefficients that depend only on constants and variables.
bool is_linear_single_function(const Expr& e);

/// True iff e references no variables or functions.
bool is_constant(const Expr& e);

/// Constant-folds e; requires is_constant(e).
double constant_value(const Expr& e);

/// Slots referenced by e, in first-visit order, without duplicates.
std::vector<std::size_t> referenced_slots(const Expr& e);

/// Fully parenthesized source text.
std::string to_source(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace hdes
