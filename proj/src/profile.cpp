#include "hdes/profile.hpp"

#include <algorithm>
#include <cmath>

#include "hdes/error.hpp"

namespace hdes {

std::vector<std::vector<double>> performance_ratios(const std::vector<std::vector<double>>& scores,
                                                    const ProfileOptions& opt) {
    if (scores.empty()) throw ContractError("performance_ratios: no problems");
    if (!(opt.r_max >= 1.0)) throw ContractError("performance_ratios: r_max must be >= 1");
    const std::size_t ns = scores.front().size();
    if (ns == 0) throw ContractError("performance_ratios: no solvers");
    std::vector<std::vector<double>> ratios;
    for (const auto& row : scores) {
        if (row.size() != ns) throw ContractError("performance_ratios: ragged score table");
        for (double v : row)
            if (!(v >= 0.0)) throw ContractError("performance_ratios: scores must be >= 0");
        const double best = *std::min_element(row.begin(), row.end());
        std::vector<double> r(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            if (row[s] > opt.threshold) r[s] = opt.r_max;
            else if (best == 0.0) r[s] = row[s] == 0.0 ? 1.0 : opt.r_max;
            else r[s] = std::min(row[s] / best, opt.r_max);
        }
        ratios.push_back(std::move(r));
    }
    return ratios;
}

double rho(std::span<const double> ratios, double tau) {
    if (ratios.empty()) throw ContractError("rho: empty problem set");
    const auto n = std::count_if(ratios.begin(), ratios.end(), [&](double r) { return r <= tau; });
    return static_cast<double>(n) / static_cast<double>(ratios.size());
}

double success_fraction(std::span<const double> ratios, double r_max) {
    if (ratios.empty()) throw ContractError("success_fraction: empty problem set");
    const auto n = std::count_if(ratios.begin(), ratios.end(), [&](double r) { return r < r_max; });
    return static_cast<double>(n) / static_cast<double>(ratios.size());
}

std::vector<double> tau_grid(double r_max, std::size_t n) {
    if (n < 2) throw ContractError("tau_grid: need at least 2 points");
    if (!(r_max > 1.0)) return {1.0, std::max(1.0, r_max)};
    std::vector<double> out(n);
    const double top = std::log10(r_max);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(10.0, top * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = 1.0;
    out.back() = r_max;
    return out;
}

std::vector<ProfileCurve> performance_profiles(const std::vector<std::vector<double>>& scores,
                                               const std::vector<std::string>& solvers,
                                               std::span<const double> taus, const ProfileOptions& opt) {
    const auto ratios = performance_ratios(scores, opt);
    if (solvers.size() != ratios.front().size()) throw ContractError("performance_profiles: solver names mismatch");
    std::vector<ProfileCurve> out;
    for (std::size_t s = 0; s < solvers.size(); ++s) {
        std::vector<double> column;
        for (const auto& row : ratios) column.push_back(row[s]);
        ProfileCurve c{solvers[s], {taus.begin(), taus.end()}, {}};
        for (double t : taus) c.rho.push_back(rho(column, t));
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace hdes
