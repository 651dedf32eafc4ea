#include "hdes/shift.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hdes/error.hpp"

namespace hdes {

ShiftFunction::ShiftFunction(std::vector<double> monomial_coefficients) : coeffs_(std::move(monomial_coefficients)) {
    for (double c : coeffs_)
        if (!std::isfinite(c)) throw ContractError("shift coefficient is not finite");
}

bool ShiftFunction::is_zero() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

double ShiftFunction::derivative(double x, int q) const {
    if (q < 0) throw ContractError("negative derivative order");
    // Horner on the q-th derivative: sum_{k>=q} a_k k!/(k-q)! x^{k-q}
    double acc = 0.0;
    for (int k = degree(); k >= q; --k) {
        double falling = 1.0;
        for (int j = 0; j < q; ++j) falling *= static_cast<double>(k - j);
        acc = acc * x + coeffs_[static_cast<std::size_t>(k)] * falling;
    }
    return acc;
}

ShiftFunction floating_shift(std::span<const double> abscissae, std::span<const double> attempt_values,
                             std::span<const double> targets) {
    const std::size_t n = abscissae.size();
    if (attempt_values.size() != n || targets.size() != n)
        throw ContractError("floating_shift: abscissae, attempt values and targets differ in length");
    if (n == 0) return ShiftFunction{};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (abscissae[i] == abscissae[j]) throw ContractError("floating_shift: duplicate boundary abscissa");

    Eigen::MatrixXd v(n, n);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            v(i, k) = p;
            p *= abscissae[i];
        }
        y(i) = attempt_values[i] - targets[i];
    }
    const Eigen::VectorXd a = v.fullPivLu().solve(y);
    return ShiftFunction(std::vector<double>(a.data(), a.data() + n));
}

}  // namespace hdes
