#pragma once

#include <span>
#include <vector>

#include "hdes/allocation.hpp"
#include "hdes/circuit.hpp"
#include "hdes/multi_index.hpp"

namespace hdes {

/// Signed spectral coefficients c_i = lambda * (p_i - p_{i + 2^{N-1}}).
std::vector<double> decode_coefficients(std::span<const double> p, double lambda);

/// A trial solution: circuit angles plus a positive scale, read through a qubit
/// allocation. Immutable; parameter updates build a new value.
class EncodedFunction {
public:
    EncodedFunction(VariableAllocation alloc, int depth, std::vector<double> angles, double lambda,
                    std::vector<AffineMap> maps = {});

    const VariableAllocation& allocation() const noexcept { return alloc_; }
    const CircuitSpec& circuit() const noexcept { return circuit_; }
    std::span<const double> angles() const noexcept { return angles_; }
    double lambda() const noexcept { return lambda_; }
    /// Empty when coordinates are used unmapped.
    std::span<const AffineMap> maps() const noexcept { return maps_; }

    std::vector<double> probabilities() const;

private:
    VariableAllocation alloc_;
    CircuitSpec circuit_;
    std::vector<double> angles_;
    double lambda_;
    std::vector<AffineMap> maps_;
};

/// lambda * <psi| O_{d^mi C}(x) |psi>
double evaluate(const EncodedFunction& f, std::span<const double> x, const MultiIndex& mi);

struct SpectralTerm {
    std::vector<int> orders;
    double coefficient = 0.0;

    bool operator==(const SpectralTerm&) const = default;
};

/// Classical Chebyshev expansion sum_t c_t prod_j T_{orders_j}(map_j(x_j)).
class SpectralExpansion {
public:
    SpectralExpansion() = default;
    SpectralExpansion(std::size_t variables, std::vector<SpectralTerm> terms, std::vector<AffineMap> maps = {});

    std::size_t variables() const noexcept { return variables_; }
    const std::vector<SpectralTerm>& terms() const noexcept { return terms_; }
    std::span<const AffineMap> maps() const noexcept { return maps_; }
    bool empty() const noexcept { return terms_.empty(); }

    double evaluate(std::span<const double> x, const MultiIndex& mi) const;
    double evaluate(std::span<const double> x) const;

private:
    std::size_t variables_ = 1;
    std::vector<SpectralTerm> terms_;
    std::vector<AffineMap> maps_;
};

/// Runs the circuit once and keeps coefficients with |c| >= 1e-14.
SpectralExpansion to_closed_form(const EncodedFunction& f);

}  // namespace hdes
