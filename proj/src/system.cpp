#include "hdes/system.hpp"

#include "hdes/error.hpp"

namespace hdes {

std::size_t DESystem::function_index(const std::string& name) const {
    for (std::size_t i = 0; i < functions.size(); ++i)
        if (functions[i].name == name) return i;
    throw ContractError("unknown function '" + name + "'");
}

std::size_t DESystem::variable_index(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i].name == name) return i;
    throw ContractError("unknown variable '" + name + "'");
}

Box DESystem::domain() const {
    Box box;
    for (const auto& v : variables) box.push_back(v.domain);
    return box;
}

Box DESystem::function_domain(std::size_t function) const {
    Box box;
    for (std::size_t v : functions.at(function).variables) box.push_back(variables.at(v).domain);
    return box;
}

Point DESystem::project(std::size_t function, const Point& system_point) const {
    if (system_point.size() != variables.size()) throw ContractError("point dimension does not match the system");
    Point out;
    for (std::size_t v : functions.at(function).variables) out.push_back(system_point[v]);
    return out;
}

const ProblemOption* DESystem::option(const std::string& key) const {
    for (const auto& o : options)
        if (o.key == key) return &o;
    return nullptr;
}

std::vector<std::set<MultiIndex>> derivative_orders(const DESystem& sys) {
    std::vector<std::set<MultiIndex>> out(sys.functions.size());
    for (const Slot& s : sys.slots) out.at(s.function).insert(s.order);
    return out;
}

std::set<MultiIndex> derivative_order_union(const DESystem& sys) {
    std::set<MultiIndex> out;
    for (const Slot& s : sys.slots) out.insert(s.order);
    return out;
}

namespace {

std::string bc_source(const DESystem& sys, const BoundaryCondition& bc) {
    const FunctionDecl& f = sys.functions.at(bc.function);
    std::string s = "bc: ";
    if (bc.order.is_zero()) {
        s += f.name;
    } else {
        s += "D(" + f.name;
        for (std::size_t j = 0; j < bc.order.size(); ++j) {
            if (bc.order[j] == 0) continue;
            s += ", " + sys.variables.at(f.variables[j]).name;
            if (bc.order[j] > 1) s += ", " + std::to_string(bc.order[j]);
        }
        s += ")";
    }
    s += "(";
    for (std::size_t j = 0; j < bc.point.size(); ++j) s += (j ? ", " : "") + format_double(bc.point[j]);
    return s + ") = " + format_double(bc.value) + ";\n";
}

}  // namespace

std::string to_source(const DESystem& sys) {
    std::string s;
    for (const auto& p : sys.parameters) s += "param " + p.name + " = " + format_double(p.value) + ";\n";
    for (const auto& v : sys.variables)
        s += "var " + v.name + " in [" + format_double(v.domain.lo) + ", " + format_double(v.domain.hi) + "];\n";
    for (const auto& f : sys.functions) {
        s += "fun " + f.name + "(";
        for (std::size_t j = 0; j < f.variables.size(); ++j) s += (j ? ", " : "") + sys.variables.at(f.variables[j]).name;
        s += ");\n";
    }
    for (const auto& o : sys.options)
        s += "option " + o.key + " = " + (o.number ? format_double(*o.number) : o.word) + ";\n";
    for (const auto& e : sys.equations) s += "eq: " + to_source(*e.expr) + " = 0;\n";
    for (const auto& bc : sys.boundary_conditions) s += bc_source(sys, bc);
    return s;
}

bool structurally_equal(const DESystem& a, const DESystem& b) {
    if (a.parameters.size() != b.parameters.size() || a.variables.size() != b.variables.size() ||
        a.functions.size() != b.functions.size() || a.equations.size() != b.equations.size() ||
        a.boundary_conditions.size() != b.boundary_conditions.size() || a.options.size() != b.options.size() ||
        a.slots != b.slots)
        return false;
    for (std::size_t i = 0; i < a.parameters.size(); ++i)
        if (a.parameters[i].name != b.parameters[i].name || a.parameters[i].value != b.parameters[i].value) return false;
    for (std::size_t i = 0; i < a.variables.size(); ++i)
        if (a.variables[i].name != b.variables[i].name || a.variables[i].domain.lo != b.variables[i].domain.lo ||
            a.variables[i].domain.hi != b.variables[i].domain.hi)
            return false;
    for (std::size_t i = 0; i < a.functions.size(); ++i)
        if (a.functions[i].name != b.functions[i].name || a.functions[i].variables != b.functions[i].variables)
            return false;
    for (std::size_t i = 0; i < a.equations.size(); ++i)
        if (!structurally_equal(*a.equations[i].expr, *b.equations[i].expr)) return false;
    for (std::size_t i = 0; i < a.boundary_conditions.size(); ++i) {
        const auto& x = a.boundary_conditions[i];
        const auto& y = b.boundary_conditions[i];
        if (x.function != y.function || x.order != y.order || x.point != y.point || x.value != y.value) return false;
    }
    for (std::size_t i = 0; i < a.options.size(); ++i)
        if (a.options[i].key != b.options[i].key || a.options[i].number != b.options[i].number ||
            a.options[i].word != b.options[i].word)
            return false;
    return true;
}

}  // namespace hdes
