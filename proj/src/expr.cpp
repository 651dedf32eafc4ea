#include "hdes/expr.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "hdes/error.hpp"
#include "hdes/numeric.hpp"

namespace hdes {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const char* op_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
    }
    return "?";
}

const char* builtin_name(Builtin fn) {
    switch (fn) {
        case Builtin::Sqrt: return "sqrt";
        case Builtin::Sin: return "sin";
        case Builtin::Cos: return "cos";
        case Builtin::Exp: return "exp";
    }
    return "?";
}

std::string where(const SourceLoc& loc) {
    return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

double checked(double v, const Expr& e) {
    if (!std::isfinite(v)) throw EvaluationError(where(e.loc) + ": non-finite value");
    return v;
}

template <class SlotValue>
double eval(const Expr& e, const SlotValue& slot_value, std::span<const double> x) {
    return std::visit(
        overloaded{
            [](const NumberNode& n) { return n.value; },
            [](const ParamNode& n) { return n.value; },
            [&](const VariableNode& n) {
                if (n.index >= x.size()) throw ContractError("variable '" + n.name + "' is not bound");
                return x[n.index];
            },
            [&](const FunctionNode& n) { return slot_value(n.slot); },
            [&](const NegateNode& n) { return -eval(*n.operand, slot_value, x); },
            [&](const BinaryNode& n) {
                const double a = eval(*n.lhs, slot_value, x);
                const double b = eval(*n.rhs, slot_value, x);
                switch (n.op) {
                    case BinaryOp::Add: return checked(a + b, e);
                    case BinaryOp::Sub: return checked(a - b, e);
                    case BinaryOp::Mul: return checked(a * b, e);
                    case BinaryOp::Div:
                        if (b == 0.0) throw EvaluationError(where(e.loc) + ": division by zero");
                        return checked(a / b, e);
                    case BinaryOp::Pow: return checked(std::pow(a, b), e);
                }
                return 0.0;
            },
            [&](const CallNode& n) {
                const double a = eval(*n.arg, slot_value, x);
                switch (n.fn) {
                    case Builtin::Sqrt: return checked(std::sqrt(a), e);
                    case Builtin::Sin: return std::sin(a);
                    case Builtin::Cos: return std::cos(a);
                    case Builtin::Exp: return checked(std::exp(a), e);
                }
                return 0.0;
            },
        },
        e.node);
}

// Classification for the single-function linearity check.
struct LinearClass {
    bool nonlinear = false;
    bool has_function = false;
    std::set<std::size_t> functions;
};

LinearClass classify(const Expr& e) {
    return std::visit(
        overloaded{
            [](const NumberNode&) { return LinearClass{}; },
            [](const ParamNode&) { return LinearClass{}; },
            [](const VariableNode&) { return LinearClass{}; },
            [](const FunctionNode& n) { return LinearClass{false, true, {n.function}}; },
            [](const NegateNode& n) { return classify(*n.operand); },
            [](const BinaryNode& n) {
                LinearClass a = classify(*n.lhs);
                LinearClass b = classify(*n.rhs);
                LinearClass out;
                out.nonlinear = a.nonlinear || b.nonlinear;
                out.has_function = a.has_function || b.has_function;
                out.functions = a.functions;
                out.functions.insert(b.functions.begin(), b.functions.end());
                switch (n.op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub: break;
                    case BinaryOp::Mul:
                        if (a.has_function && b.has_function) out.nonlinear = true;
                        break;
                    case BinaryOp::Div:
                        if (b.has_function) out.nonlinear = true;
                        break;
                    case BinaryOp::Pow:
                        if (b.has_function) out.nonlinear = true;
                        if (a.has_function && !(is_constant(*n.rhs) && constant_value(*n.rhs) == 1.0))
                            out.nonlinear = true;
                        break;
                }
                return out;
            },
            [](const CallNode& n) {
                LinearClass a = classify(*n.arg);
                if (a.has_function) a.nonlinear = true;
                return a;
            },
        },
        e.node);
}

void collect_slots(const Expr& e, std::vector<std::size_t>& out) {
    std::visit(overloaded{
                   [](const NumberNode&) {},
                   [](const ParamNode&) {},
                   [](const VariableNode&) {},
                   [&](const FunctionNode& n) {
                       if (std::find(out.begin(), out.end(), n.slot) == out.end()) out.push_back(n.slot);
                   },
                   [&](const NegateNode& n) { collect_slots(*n.operand, out); },
                   [&](const BinaryNode& n) {
                       collect_slots(*n.lhs, out);
                       collect_slots(*n.rhs, out);
                   },
                   [&](const CallNode& n) { collect_slots(*n.arg, out); },
               },
               e.node);
}

std::string function_source(const FunctionNode& n) {
    if (n.order.is_zero()) {
        if (!n.explicit_args) return n.name;
        std::string s = n.name + "(";
        for (std::size_t i = 0; i < n.variables.size(); ++i) s += (i ? ", " : "") + n.variables[i];
        return s + ")";
    }
    std::string s = "D(" + n.name;
    for (std::size_t j = 0; j < n.order.size(); ++j) {
        if (n.order[j] == 0) continue;
        s += ", " + n.variables.at(j);
        if (n.order[j] > 1) s += ", " + std::to_string(n.order[j]);
    }
    return s + ")";
}

}  // namespace

ExprPtr make_expr(decltype(Expr::node) node, SourceLoc loc) {
    return std::make_shared<const Expr>(Expr{std::move(node), loc});
}

Bindings::Bindings(std::span<const Slot> slots)
    : slots_(slots.begin(), slots.end()), values_(slots.size(), 0.0), bound_(slots.size(), false) {}

void Bindings::set(std::size_t function, const MultiIndex& order, double value) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].function == function && slots_[i].order == order) {
            set_slot(i, value);
            return;
        }
    }
    throw ContractError("no slot for function " + std::to_string(function) + " order (" + order.to_string() + ")");
}

void Bindings::set_slot(std::size_t slot, double value) {
    if (slot >= values_.size()) throw ContractError("slot index out of range");
    values_[slot] = value;
    bound_[slot] = true;
}

bool Bindings::is_bound(std::size_t slot) const { return slot < bound_.size() && bound_[slot]; }

double Bindings::get(std::size_t slot) const {
    if (!is_bound(slot)) throw ContractError("missing binding for slot " + std::to_string(slot));
    return values_[slot];
}

double evaluate_residual(const Expr& e, const Bindings& bindings, std::span<const double> x) {
    return eval(e, [&](std::size_t slot) { return bindings.get(slot); }, x);
}

double evaluate_expr(const Expr& e, std::span<const double> slot_values, std::span<const double> x) {
    return eval(e, [&](std::size_t slot) { return slot_values[slot]; }, x);
}

bool is_linear_single_function(const Expr& e) {
    const LinearClass c = classify(e);
    return !c.nonlinear && c.functions.size() == 1;
}

bool is_constant(const Expr& e) {
    return std::visit(overloaded{
                          [](const NumberNode&) { return true; },
                          [](const ParamNode&) { return true; },
                          [](const VariableNode&) { return false; },
                          [](const FunctionNode&) { return false; },
                          [](const NegateNode& n) { return is_constant(*n.operand); },
                          [](const BinaryNode& n) { return is_constant(*n.lhs) && is_constant(*n.rhs); },
                          [](const CallNode& n) { return is_constant(*n.arg); },
                      },
                      e.node);
}

double constant_value(const Expr& e) {
    if (!is_constant(e)) throw ContractError("expression is not constant");
    return eval(e, [](std::size_t) { return 0.0; }, {});
}

std::vector<std::size_t> referenced_slots(const Expr& e) {
    std::vector<std::size_t> out;
    collect_slots(e, out);
    return out;
}

std::string to_source(const Expr& e) {
    return std::visit(overloaded{
                          [](const NumberNode& n) {
                              const std::string s = format_double(n.value);
                              return n.value < 0 ? "(" + s + ")" : s;
                          },
                          [](const ParamNode& n) { return n.name; },
                          [](const VariableNode& n) { return n.name; },
                          [](const FunctionNode& n) { return function_source(n); },
                          [](const NegateNode& n) { return "(-" + to_source(*n.operand) + ")"; },
                          [](const BinaryNode& n) {
                              return "(" + to_source(*n.lhs) + " " + op_text(n.op) + " " + to_source(*n.rhs) + ")";
                          },
                          [](const CallNode& n) {
                              return std::string(builtin_name(n.fn)) + "(" + to_source(*n.arg) + ")";
                          },
                      },
                      e.node);
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        overloaded{
            [&](const NumberNode& n) { return n.value == std::get<NumberNode>(b.node).value; },
            [&](const ParamNode& n) {
                const auto& m = std::get<ParamNode>(b.node);
                return n.name == m.name && n.value == m.value;
            },
            [&](const VariableNode& n) {
                const auto& m = std::get<VariableNode>(b.node);
                return n.name == m.name && n.index == m.index;
            },
            [&](const FunctionNode& n) {
                const auto& m = std::get<FunctionNode>(b.node);
                return n.name == m.name && n.function == m.function && n.order == m.order && n.slot == m.slot &&
                       n.explicit_args == m.explicit_args;
            },
            [&](const NegateNode& n) {
                return structurally_equal(*n.operand, *std::get<NegateNode>(b.node).operand);
            },
            [&](const BinaryNode& n) {
                const auto& m = std::get<BinaryNode>(b.node);
                return n.op == m.op && structurally_equal(*n.lhs, *m.lhs) && structurally_equal(*n.rhs, *m.rhs);
            },
            [&](const CallNode& n) {
                const auto& m = std::get<CallNode>(b.node);
                return n.fn == m.fn && structurally_equal(*n.arg, *m.arg);
            },
        },
        a.node);
}

}  // namespace hdes
