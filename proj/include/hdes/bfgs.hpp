#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hdes {

using Objective = std::function<double(std::span<const double>)>;
/// Writes the gradient at x into g.
using GradientFn = std::function<void(std::span<const double> x, std::span<double> g)>;

struct BfgsOptions {
    std::size_t max_iterations = 200;
    double target_loss = 1e-6;
    double gradient_tolerance = 1e-10;  // on the infinity norm
    double fd_step = 1e-7;
    double c1 = 1e-4;
    double c2 = 0.9;
    /// Threads used for finite-difference gradients; the objective must then be
    /// safe to call concurrently.
    std::size_t workers = 1;
};

struct BfgsResult {
    std::vector<double> x;
    double value = 0.0;
    /// Objective at the start, then after every accepted iteration.
    std::vector<double> trace;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    /// target_reached | gradient_converged | max_iterations | line_search_stalled
    std::string termination;
};

std::vector<double> central_difference_gradient(const Objective& f, std::span<const double> x, double h,
                                                std::size_t workers = 1);

/// Quasi-Newton minimization with a dense inverse-Hessian update and a strong-Wolfe
/// line search. Uses central differences unless `gradient` is given.
/// Throws ContractError if the objective is not finite at x0.
BfgsResult bfgs_minimize(const Objective& f, std::vector<double> x0, const BfgsOptions& options = {},
                         const GradientFn& gradient = {});

}  // namespace hdes
