#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hdes {

struct ProfileOptions {
    double threshold = 5e-2;  // scores above this count as unsolved
    double r_max = 1e6;
};

/// scores[p][s] for problem p and solver s; returns ratios r[p][s] in [1, r_max].
/// Unsolved entries get r_max. When the best score is 0, zero-score solvers get 1
/// and the rest r_max.
std::vector<std::vector<double>> performance_ratios(const std::vector<std::vector<double>>& scores,
                                                    const ProfileOptions& opt = {});

/// Fraction of problems with ratio <= tau; `ratios` holds one solver's column.
double rho(std::span<const double> ratios, double tau);

/// Fraction of problems with ratio < r_max, i.e. the limit of rho from the left at r_max.
double success_fraction(std::span<const double> ratios, double r_max);

/// Log-spaced grid over [1, r_max] containing both ends, n >= 2 points.
std::vector<double> tau_grid(double r_max, std::size_t n = 200);

struct ProfileCurve {
    std::string solver;
    std::vector<double> tau;
    std::vector<double> rho;
};

std::vector<ProfileCurve> performance_profiles(const std::vector<std::vector<double>>& scores,
                                               const std::vector<std::string>& solvers,
                                               std::span<const double> taus, const ProfileOptions& opt = {});

}  // namespace hdes
