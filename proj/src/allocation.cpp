#include "hdes/allocation.hpp"

#include <string>

#include "hdes/error.hpp"

namespace hdes {

VariableAllocation::VariableAllocation(std::vector<int> qubits_per_variable)
    : per_variable_(std::move(qubits_per_variable)) {
    if (per_variable_.empty()) throw ContractError("allocation needs at least one variable");
    for (int l : per_variable_) {
        if (l < 1) throw ContractError("every variable needs at least one order qubit");
        total_ += l;
    }
    if (total_ > kMaxQubits) {
        throw ContractError("allocation uses " + std::to_string(total_) + " qubits, cap is " +
                            std::to_string(kMaxQubits));
    }
}

VariableAllocation VariableAllocation::split(int total_qubits, std::size_t variables) {
    if (variables == 0) throw ContractError("allocation needs at least one variable");
    const int order_qubits = total_qubits - 1;
    if (order_qubits < static_cast<int>(variables)) {
        throw ContractError(std::to_string(total_qubits) + " qubits cannot cover a sign qubit plus " +
                            std::to_string(variables) + " variables");
    }
    const int v = static_cast<int>(variables);
    std::vector<int> per(variables, order_qubits / v);
    for (int j = 0; j < order_qubits % v; ++j) ++per[static_cast<std::size_t>(j)];
    return VariableAllocation(std::move(per));
}

IndexSplit index_split(std::uint64_t index, const VariableAllocation& alloc) {
    if (index >= alloc.dimension()) {
        throw ContractError("index_split: basis index " + std::to_string(index) + " out of range");
    }
    IndexSplit out;
    int remaining = alloc.total_qubits() - 1;
    out.sign = static_cast<int>((index >> remaining) & 1u);
    out.orders.reserve(alloc.variables());
    for (int l : alloc.qubits_per_variable()) {
        remaining -= l;
        out.orders.push_back(static_cast<int>((index >> remaining) & ((std::uint64_t{1} << l) - 1)));
    }
    return out;
}

AffineMap AffineMap::onto_unit(double lo, double hi) {
    if (!(hi > lo)) return {};
    const double scale = 2.0 / (hi - lo);
    return {scale, -1.0 - scale * lo};
}

}  // namespace hdes
