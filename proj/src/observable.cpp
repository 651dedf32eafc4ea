#include "hdes/observable.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "hdes/cheb.hpp"
#include "hdes/error.hpp"
#include "hdes/samples.hpp"

namespace hdes {

namespace {

// Univariate factor values for one axis: values[L] = scale^q * T_L^{(q)}(scale*x + offset).
std::vector<double> axis_factors(int order_count, int q, double x, const AffineMap& map) {
    std::vector<double> values(static_cast<std::size_t>(order_count));
    const double t = map.apply(x);
    const double chain = std::pow(map.scale, q);
    for (int L = 0; L < order_count; ++L) values[static_cast<std::size_t>(L)] = chain * cheb_derivative_eval(L, q, t);
    return values;
}

// Assembles the diagonal from per-axis factor tables (product form).
std::vector<double> assemble(const VariableAllocation& alloc, const std::vector<const std::vector<double>*>& factors) {
    const std::size_t half = alloc.half_dimension();
    std::vector<double> diag(alloc.dimension());
    for (std::size_t i = 0; i < half; ++i) {
        const IndexSplit split = index_split(i, alloc);
        double value = 1.0;
        for (std::size_t j = 0; j < split.orders.size(); ++j) {
            value *= (*factors[j])[static_cast<std::size_t>(split.orders[j])];
        }
        diag[i] = value;
        diag[i + half] = -value;
    }
    return diag;
}

void check_inputs(const VariableAllocation& alloc, std::span<const double> x, const MultiIndex& mi,
                  std::span<const AffineMap> maps) {
    if (x.size() != alloc.variables()) throw ContractError("observable: point dimension does not match allocation");
    if (mi.size() != alloc.variables()) {
        throw ContractError("observable: multi-index dimension does not match allocation");
    }
    if (!maps.empty() && maps.size() != alloc.variables()) {
        throw ContractError("observable: one coordinate map per variable expected");
    }
}

const AffineMap& map_for(std::span<const AffineMap> maps, std::size_t j) {
    static const AffineMap identity{};
    return maps.empty() ? identity : maps[j];
}

}  // namespace

DiagonalObservable::DiagonalObservable(std::vector<double> diag, Point point, MultiIndex order)
    : diag_(std::move(diag)), point_(std::move(point)), order_(std::move(order)) {
    const std::size_t n = diag_.size();
    if (n < 2 || (n & (n - 1)) != 0) throw ContractError("observable diagonal length must be a power of two >= 2");
}

int DiagonalObservable::qubits() const noexcept { return std::countr_zero(diag_.size()); }

bool DiagonalObservable::is_sign_antisymmetric() const noexcept {
    const std::size_t half = diag_.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        if (diag_[i + half] != -diag_[i]) return false;
    }
    return true;
}

DiagonalObservable build_observable(const VariableAllocation& alloc, std::span<const double> x,
                                    const MultiIndex& mi, std::span<const AffineMap> maps) {
    check_inputs(alloc, x, mi, maps);
    std::vector<std::vector<double>> tables;
    tables.reserve(alloc.variables());
    for (std::size_t j = 0; j < alloc.variables(); ++j) {
        tables.push_back(axis_factors(alloc.order_count(j), mi[j], x[j], map_for(maps, j)));
    }
    std::vector<const std::vector<double>*> refs;
    for (const auto& t : tables) refs.push_back(&t);
    return DiagonalObservable(assemble(alloc, refs), Point(x.begin(), x.end()), mi);
}

double expectation(const DiagonalObservable& obs, std::span<const double> p) {
    if (p.size() != obs.size()) throw ContractError("expectation: probability vector length mismatch");
    return dot(obs.diag(), p);
}

double expectation_from_counts(const DiagonalObservable& obs, const Counts& counts, std::uint64_t shots) {
    if (counts.empty() || shots == 0) throw ContractError("expectation_from_counts: empty counts");
    std::uint64_t total = 0;
    double sum = 0.0;
    for (const auto& [index, count] : counts) {
        if (index >= obs.size()) throw ContractError("expectation_from_counts: basis index out of range");
        sum += obs.diag()[index] * static_cast<double>(count);
        total += count;
    }
    if (total != shots) throw ContractError("expectation_from_counts: counts do not sum to shots");
    return sum / static_cast<double>(shots);
}

int PauliZString::eigenvalue(std::uint64_t index) const noexcept {
    return (std::popcount(index & mask) % 2 == 0) ? 1 : -1;
}

std::string PauliZString::label() const {
    std::string out;
    for (int q = 0; q < qubits; ++q) out += has_z(q) ? 'Z' : 'I';
    return out;
}

std::vector<PauliZString> pauli_decompose(std::span<const double> diag) {
    const std::size_t n = diag.size();
    if (n < 2 || (n & (n - 1)) != 0) throw ContractError("pauli_decompose: length must be a power of two >= 2");
    const int qubits = std::countr_zero(n);
    // Walsh-Hadamard transform; butterflies on the most significant (sign) bit first so
    // antisymmetric diagonals cancel exactly on the identity-sign half.
    std::vector<double> c(diag.begin(), diag.end());
    for (std::size_t width = n / 2; width >= 1; width /= 2) {
        for (std::size_t block = 0; block < n; block += 2 * width) {
            for (std::size_t i = block; i < block + width; ++i) {
                const double a = c[i];
                const double b = c[i + width];
                c[i] = a + b;
                c[i + width] = a - b;
            }
        }
    }
    double largest = 0.0;
    for (double& v : c) {
        v /= static_cast<double>(n);
        largest = std::max(largest, std::fabs(v));
    }
    std::vector<PauliZString> out;
    for (std::size_t m = 0; m < n; ++m) {
        if (c[m] != 0.0 && std::fabs(c[m]) > 1e-15 * largest) out.push_back({m, c[m], qubits});
    }
    return out;
}

std::vector<PauliZString> pauli_decompose(const DiagonalObservable& obs) { return pauli_decompose(obs.diag()); }

double pauli_expectation(std::span<const PauliZString> strings, std::span<const double> p) {
    double total = 0.0;
    for (const auto& s : strings) {
        double z = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) z += s.eigenvalue(i) * p[i];
        total += s.coefficient * z;
    }
    return total;
}

double pauli_expectation_from_counts(std::span<const PauliZString> strings, const Counts& counts,
                                     std::uint64_t shots) {
    if (counts.empty() || shots == 0) throw ContractError("pauli_expectation_from_counts: empty counts");
    double total = 0.0;
    for (const auto& s : strings) {
        double z = 0.0;
        for (const auto& [index, count] : counts) z += s.eigenvalue(index) * static_cast<double>(count);
        total += s.coefficient * z / static_cast<double>(shots);
    }
    return total;
}

DiagonalObservable combine_linear(std::span<const WeightedObservable> terms) {
    if (terms.empty()) throw ContractError("combine_linear: no terms");
    const std::size_t n = terms.front().second.size();
    std::vector<double> diag(n, 0.0);
    for (const auto& [weight, obs] : terms) {
        if (obs.size() != n) throw ContractError("combine_linear: observables differ in size");
        const auto d = obs.diag();
        for (std::size_t i = 0; i < n; ++i) diag[i] += weight * d[i];
    }
    const auto& first = terms.front().second;
    return DiagonalObservable(std::move(diag), first.point(), first.order());
}

ObservableTable::ObservableTable(std::vector<MultiIndex> orders, std::vector<Point> points,
                                 std::vector<DiagonalObservable> entries)
    : orders_(std::move(orders)), points_(std::move(points)), entries_(std::move(entries)) {
    if (entries_.size() != orders_.size() * points_.size()) throw ContractError("ObservableTable: size mismatch");
}

bool ObservableTable::contains(const MultiIndex& order) const {
    return std::find(orders_.begin(), orders_.end(), order) != orders_.end();
}

const DiagonalObservable& ObservableTable::at(const MultiIndex& order, std::size_t point_index) const {
    const auto it = std::find(orders_.begin(), orders_.end(), order);
    if (it == orders_.end()) throw ContractError("ObservableTable: derivative order " + order.to_string() + " absent");
    if (point_index >= points_.size()) throw ContractError("ObservableTable: point index out of range");
    const auto row = static_cast<std::size_t>(it - orders_.begin());
    return entries_[row * points_.size() + point_index];
}

ObservableTable generate_observables(std::span<const MultiIndex> orders, std::span<const Point> points,
                                     const VariableAllocation& alloc, std::span<const AffineMap> maps) {
    if (orders.empty()) throw ContractError("generate_observables: empty derivative-order set");
    std::vector<MultiIndex> unique;
    for (const auto& mi : orders) {
        if (std::find(unique.begin(), unique.end(), mi) == unique.end()) unique.push_back(mi);
    }
    for (const auto& mi : unique) {
        if (mi.size() != alloc.variables()) throw ContractError("generate_observables: multi-index dimension mismatch");
    }

    std::vector<DiagonalObservable> entries(unique.size() * points.size());
    for (std::size_t s = 0; s < points.size(); ++s) {
        const Point& x = points[s];
        check_inputs(alloc, x, unique.front(), maps);
        // Memo of univariate factors for this point, keyed by (axis, derivative order).
        std::map<std::pair<std::size_t, int>, std::vector<double>> memo;
        for (const auto& mi : unique) {
            for (std::size_t j = 0; j < alloc.variables(); ++j) {
                const auto key = std::make_pair(j, mi[j]);
                if (!memo.contains(key)) memo.emplace(key, axis_factors(alloc.order_count(j), mi[j], x[j], map_for(maps, j)));
            }
        }
        for (std::size_t r = 0; r < unique.size(); ++r) {
            std::vector<const std::vector<double>*> refs;
            for (std::size_t j = 0; j < alloc.variables(); ++j) refs.push_back(&memo.at({j, unique[r][j]}));
            entries[r * points.size() + s] = DiagonalObservable(assemble(alloc, refs), x, unique[r]);
        }
    }
    return ObservableTable(std::move(unique), std::vector<Point>(points.begin(), points.end()), std::move(entries));
}

ObservableTable generate_observables(std::span<const MultiIndex> orders, const Box& domain,
                                     const VariableAllocation& alloc, std::size_t n_samples) {
    const std::vector<Point> samples = generate_samples(n_samples, domain);
    return generate_observables(orders, samples, alloc);
}

}  // namespace hdes
