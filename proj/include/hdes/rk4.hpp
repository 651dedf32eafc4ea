#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hdes/reference.hpp"
#include "hdes/system.hpp"

namespace hdes {

/// y' = F(x, y)
using OdeRhs = std::function<std::vector<double>(double x, std::span<const double> y)>;

/// Classic fourth-order Runge-Kutta on a uniform grid with cubic Hermite dense output.
class Rk4Trajectory {
public:
    /// Integrates from x0 to x1 (x1 > x0) with the largest uniform step <= h.
    Rk4Trajectory(OdeRhs rhs, double x0, std::vector<double> y0, double x1, double h);

    double x0() const noexcept { return xs_.front(); }
    double x1() const noexcept { return xs_.back(); }
    std::size_t steps() const noexcept { return xs_.size() - 1; }
    const std::vector<double>& final_state() const noexcept { return ys_.back(); }

    /// Interpolated state at x in [x0, x1].
    std::vector<double> state(double x) const;
    /// F(x, state(x)).
    std::vector<double> rhs(double x) const;

private:
    OdeRhs rhs_;
    std::vector<double> xs_;
    std::vector<std::vector<double>> ys_;
    std::vector<std::vector<double>> dys_;
};

/// Reference for a univariate system of ODEs. Each equation is solved for the highest
/// derivative of one function; lower derivatives become state components. Conditions
/// all at the left end form an initial value problem, otherwise Newton shooting on the
/// missing initial values is used. Orders up to the highest one come from the state
/// and F, one order beyond from a central difference of F with step 1e-5.
/// Throws ContractError if the system cannot be put in this form.
ReferenceSolution rk4_reference(const DESystem& sys, double h = 1e-3);

}  // namespace hdes
