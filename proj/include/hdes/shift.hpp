#pragma once

#include <span>
#include <vector>

namespace hdes {

/// Univariate polynomial sum_k a_k x^k subtracted from an attempt so that its value
/// boundary conditions hold exactly.
class ShiftFunction {
public:
    ShiftFunction() = default;
    explicit ShiftFunction(std::vector<double> monomial_coefficients);

    const std::vector<double>& coefficients() const noexcept { return coeffs_; }
    bool is_zero() const noexcept;
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

    double value(double x) const { return derivative(x, 0); }
    /// q-th derivative; zero for q > degree.
    double derivative(double x, int q) const;

private:
    std::vector<double> coeffs_;
};

/// Fits the degree n-1 polynomial through (x_j, attempt_j - target_j).
/// Throws ContractError on length mismatch or duplicate abscissae.
ShiftFunction floating_shift(std::span<const double> abscissae, std::span<const double> attempt_values,
                             std::span<const double> targets);

}  // namespace hdes
