#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hdes {

/// Qubit budget of one encoded function: one sign qubit followed by l_j order qubits
/// for every variable, most significant first.
class VariableAllocation {
public:
    static constexpr int kMaxQubits = 20;

    explicit VariableAllocation(std::vector<int> qubits_per_variable);

    /// Splits `total_qubits - 1` order qubits over `variables`; earlier variables get
    /// the remainder.
    static VariableAllocation split(int total_qubits, std::size_t variables);

    int total_qubits() const noexcept { return total_; }
    std::size_t variables() const noexcept { return per_variable_.size(); }
    int qubits_for(std::size_t variable) const { return per_variable_.at(variable); }
    int order_count(std::size_t variable) const { return 1 << qubits_for(variable); }
    const std::vector<int>& qubits_per_variable() const noexcept { return per_variable_; }

    std::size_t dimension() const noexcept { return std::size_t{1} << total_; }
    std::size_t half_dimension() const noexcept { return dimension() / 2; }

    bool operator==(const VariableAllocation&) const = default;

private:
    std::vector<int> per_variable_;
    int total_ = 1;
};

struct IndexSplit {
    int sign = 0;
    std::vector<int> orders;
};

/// Splits basis index i into its sign bit and per-variable Chebyshev orders.
IndexSplit index_split(std::uint64_t index, const VariableAllocation& alloc);

/// Coordinate map t = scale * x + offset applied before Chebyshev evaluation.
struct AffineMap {
    double scale = 1.0;
    double offset = 0.0;

    double apply(double x) const noexcept { return scale * x + offset; }
    bool is_identity() const noexcept { return scale == 1.0 && offset == 0.0; }

    /// Map sending [lo, hi] onto [-1, 1].
    static AffineMap onto_unit(double lo, double hi);

    bool operator==(const AffineMap&) const = default;
};

}  // namespace hdes
