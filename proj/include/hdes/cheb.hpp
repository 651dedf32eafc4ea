#pragma once

#include <span>
#include <vector>

#include "hdes/multi_index.hpp"

namespace hdes {

/// Highest polynomial order accepted by the exact derivative expansion.
inline constexpr int kMaxDerivativeOrder = 64;

/// One univariate Chebyshev factor: T_order differentiated `derivative` times.
struct ChebTerm {
    int order = 0;
    int derivative = 0;

    auto operator<=>(const ChebTerm&) const = default;
};

/// Chebyshev polynomial of the first kind, T_k(x), valid on the whole real line.
double cheb_eval(int k, double x);

/// Coefficients a_j such that d^q T_k / dx^q = sum_j a_j T_j(x), j = 0..k-q.
/// Built from the closed-form expansion with exact integer arithmetic (k <= 64);
/// the j = 0 term is already halved.
std::vector<double> cheb_derivative_coefficients(int k, int q);

double cheb_derivative_eval(int k, int q, double x);

inline double cheb_eval(ChebTerm term, double x) { return cheb_derivative_eval(term.order, term.derivative, x); }

/// prod_j T_{orders_j}(x_j)
double cheb_multi_eval(std::span<const int> orders, std::span<const double> x);

/// Mixed partial of the product basis function, computed as the explicit product of
/// differentiated and undifferentiated univariate factors.
double cheb_multi_partial(std::span<const int> orders, const MultiIndex& mi, std::span<const double> x);

}  // namespace hdes
