#include "hdes/cheb.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hdes/error.hpp"

namespace hdes {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr u128 kU128Max = ~static_cast<u128>(0);

u128 checked_mul(u128 a, u128 b) {
    if (a != 0 && b > kU128Max / a) {
        throw DomainError("Chebyshev derivative coefficient exceeds exact integer range");
    }
    return a * b;
}

// n choose r with every intermediate kept exact (the running value is itself a binomial).
u128 binomial(int n, int r) {
    if (r < 0 || r > n) return 0;
    if (r > n - r) r = n - r;
    u128 result = 1;
    for (int i = 0; i < r; ++i) {
        result = checked_mul(result, static_cast<u128>(n - i));
        result /= static_cast<u128>(i + 1);
    }
    return result;
}

void require_finite(double x) {
    if (!std::isfinite(x)) throw DomainError("Chebyshev evaluation at non-finite point");
}

}  // namespace

double cheb_eval(int k, double x) {
    if (k < 0) throw ContractError("cheb_eval: order must be non-negative");
    require_finite(x);
    const double kd = static_cast<double>(k);
    if (std::fabs(x) <= 1.0) return std::cos(kd * std::acos(x));
    if (x >= 1.0) return std::cosh(kd * std::acosh(x));
    const double magnitude = std::cosh(kd * std::acosh(-x));
    return (k % 2 == 0) ? magnitude : -magnitude;
}

std::vector<double> cheb_derivative_coefficients(int k, int q) {
    if (k < 0 || q < 0) throw ContractError("cheb_derivative_coefficients: negative order");
    if (q == 0) {
        std::vector<double> unit(static_cast<std::size_t>(k) + 1, 0.0);
        unit[static_cast<std::size_t>(k)] = 1.0;
        return unit;
    }
    if (k > kMaxDerivativeOrder) {
        throw DomainError("Chebyshev derivative requested for order " + std::to_string(k) + " > " +
                          std::to_string(kMaxDerivativeOrder));
    }
    if (q > k) return {};

    std::vector<double> coeffs(static_cast<std::size_t>(k - q) + 1, 0.0);
    // Only j with j = k - q (mod 2) contribute.
    for (int j = (k - q) % 2; j <= k - q; j += 2) {
        const int top = (k + q - j) / 2 - 1;
        const int bottom = (k - q - j) / 2;
        u128 value = binomial(top, bottom);
        // ((k+q+j)/2 - 1)! / ((k-q+j)/2)!
        for (int m = (k - q + j) / 2 + 1; m <= (k + q + j) / 2 - 1; ++m) {
            value = checked_mul(value, static_cast<u128>(m));
        }
        value = checked_mul(value, static_cast<u128>(k));
        // 2^q, halved for the j = 0 term of the primed sum.
        const int power = (j == 0) ? q - 1 : q;
        for (int p = 0; p < power; ++p) value = checked_mul(value, 2);
        coeffs[static_cast<std::size_t>(j)] = static_cast<double>(value);
    }
    return coeffs;
}

double cheb_derivative_eval(int k, int q, double x) {
    if (k < 0 || q < 0) throw ContractError("cheb_derivative_eval: negative order");
    require_finite(x);
    if (q == 0) return cheb_eval(k, x);
    if (q > k) return 0.0;
    const std::vector<double> coeffs = cheb_derivative_coefficients(k, q);
    double sum = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        if (coeffs[j] != 0.0) sum += coeffs[j] * cheb_eval(static_cast<int>(j), x);
    }
    return sum;
}

double cheb_multi_eval(std::span<const int> orders, std::span<const double> x) {
    if (orders.size() != x.size()) throw ContractError("cheb_multi_eval: orders/point length mismatch");
    double product = 1.0;
    for (std::size_t j = 0; j < orders.size(); ++j) product *= cheb_eval(orders[j], x[j]);
    return product;
}

double cheb_multi_partial(std::span<const int> orders, const MultiIndex& mi, std::span<const double> x) {
    if (orders.size() != x.size() || mi.size() != x.size()) {
        throw ContractError("cheb_multi_partial: orders/multi-index/point length mismatch");
    }
    double product = 1.0;
    for (std::size_t j = 0; j < orders.size(); ++j) {
        product *= (mi[j] > 0) ? cheb_derivative_eval(orders[j], mi[j], x[j]) : cheb_eval(orders[j], x[j]);
    }
    return product;
}

}  // namespace hdes
