#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdes/allocation.hpp"
#include "hdes/circuit.hpp"
#include "hdes/multi_index.hpp"
#include "hdes/numeric.hpp"

namespace hdes {

/// Dense diagonal of an observable on 2^N basis states, tagged with the sample point
/// and derivative order it was built for.
class DiagonalObservable {
public:
    DiagonalObservable() = default;
    explicit DiagonalObservable(std::vector<double> diag, Point point = {}, MultiIndex order = {});

    std::span<const double> diag() const noexcept { return diag_; }
    std::size_t size() const noexcept { return diag_.size(); }
    int qubits() const noexcept;
    const Point& point() const noexcept { return point_; }
    const MultiIndex& order() const noexcept { return order_; }

    /// diag[i + 2^{N-1}] == -diag[i] for all i in the lower half.
    bool is_sign_antisymmetric() const noexcept;

private:
    std::vector<double> diag_;
    Point point_;
    MultiIndex order_;
};

/// Observable whose expectation (times lambda) is the `mi` partial derivative of the
/// encoded function at `x`. `maps` (optional, one per variable) rescale coordinates
/// before Chebyshev evaluation, with the chain-rule factor applied.
DiagonalObservable build_observable(const VariableAllocation& alloc, std::span<const double> x,
                                    const MultiIndex& mi, std::span<const AffineMap> maps = {});

double expectation(const DiagonalObservable& obs, std::span<const double> p);

double expectation_from_counts(const DiagonalObservable& obs, const Counts& counts, std::uint64_t shots);

/// Tensor product of I/Z factors selected by `mask` (bit N-1-k set means Z on qubit k).
struct PauliZString {
    std::uint64_t mask = 0;
    double coefficient = 0.0;
    int qubits = 0;

    bool has_z(int qubit) const noexcept { return (mask >> (qubits - 1 - qubit)) & 1u; }
    /// Eigenvalue on basis state |i>: (-1)^popcount(i & mask).
    int eigenvalue(std::uint64_t index) const noexcept;
    /// "ZIZ" style label, qubit 0 first.
    std::string label() const;
};

std::vector<PauliZString> pauli_decompose(std::span<const double> diag);
std::vector<PauliZString> pauli_decompose(const DiagonalObservable& obs);

/// sum_m c_m <Z_m> from a probability vector.
double pauli_expectation(std::span<const PauliZString> strings, std::span<const double> p);
double pauli_expectation_from_counts(std::span<const PauliZString> strings, const Counts& counts,
                                     std::uint64_t shots);

using WeightedObservable = std::pair<double, DiagonalObservable>;

DiagonalObservable combine_linear(std::span<const WeightedObservable> terms);

/// Observables for every (derivative order, point) pair of one allocation.
class ObservableTable {
public:
    ObservableTable(std::vector<MultiIndex> orders, std::vector<Point> points,
                    std::vector<DiagonalObservable> entries);

    const std::vector<MultiIndex>& orders() const noexcept { return orders_; }
    const std::vector<Point>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return entries_.size(); }

    const DiagonalObservable& at(const MultiIndex& order, std::size_t point_index) const;
    bool contains(const MultiIndex& order) const;

private:
    std::vector<MultiIndex> orders_;
    std::vector<Point> points_;
    std::vector<DiagonalObservable> entries_;  // order-major
};

/// Builds the table over explicit points, evaluating each univariate
/// (order, derivative, coordinate) factor once.
ObservableTable generate_observables(std::span<const MultiIndex> orders, std::span<const Point> points,
                                     const VariableAllocation& alloc, std::span<const AffineMap> maps = {});

/// Builds the sample set with generate_samples and then the table over it.
ObservableTable generate_observables(std::span<const MultiIndex> orders, const Box& domain,
                                     const VariableAllocation& alloc, std::size_t n_samples);

}  // namespace hdes
