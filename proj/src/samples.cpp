#include "hdes/samples.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>

#include "hdes/error.hpp"

namespace hdes {

std::vector<std::size_t> grid_counts(std::size_t n, const Box& domain) {
    if (n == 0) throw ContractError("generate_samples: n_s must be at least 1");
    if (domain.empty()) throw ContractError("generate_samples: empty domain");
    std::vector<std::size_t> free_axes;
    for (std::size_t j = 0; j < domain.size(); ++j) {
        if (domain[j].hi < domain[j].lo) throw ContractError("generate_samples: interval with hi < lo");
        if (domain[j].hi > domain[j].lo) free_axes.push_back(j);
    }
    std::vector<std::size_t> counts(domain.size(), 1);
    if (free_axes.empty()) return counts;
    if (free_axes.size() == 1) {
        counts[free_axes[0]] = n;
        return counts;
    }

    // Exhaustive search over per-axis counts: closest product, then most balanced,
    // then larger counts on earlier axes.
    const std::size_t v = free_axes.size();
    std::vector<std::size_t> current(v, 1), best;
    long best_gap = -1;
    std::size_t best_spread = 0;
    std::function<void(std::size_t, std::size_t)> search = [&](std::size_t axis, std::size_t product) {
        if (axis == v) {
            const long gap = std::labs(static_cast<long>(product) - static_cast<long>(n));
            std::size_t lo = current[0], hi = current[0];
            for (std::size_t c : current) {
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            const std::size_t spread = hi - lo;
            bool better = best_gap < 0 || gap < best_gap || (gap == best_gap && spread < best_spread);
            if (!better && gap == best_gap && spread == best_spread) better = current > best;
            if (better) {
                best_gap = gap;
                best_spread = spread;
                best = current;
            }
            return;
        }
        for (std::size_t c = 1; c <= n; ++c) {
            if (product * c > 2 * n) break;
            current[axis] = c;
            search(axis + 1, product * c);
        }
        current[axis] = 1;
    };
    search(0, 1);
    for (std::size_t k = 0; k < v; ++k) counts[free_axes[k]] = best[k];
    return counts;
}

std::vector<Point> generate_samples(std::size_t n, const Box& domain) {
    const std::vector<std::size_t> counts = grid_counts(n, domain);
    std::vector<std::vector<double>> axes;
    std::size_t total = 1;
    for (std::size_t j = 0; j < domain.size(); ++j) {
        const auto& iv = domain[j];
        axes.push_back(iv.hi > iv.lo ? linspace(iv.lo, iv.hi, counts[j]) : std::vector<double>{iv.lo});
        total *= axes.back().size();
    }
    std::vector<Point> points;
    points.reserve(total);
    std::vector<std::size_t> idx(domain.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
        Point p(domain.size());
        for (std::size_t j = 0; j < domain.size(); ++j) p[j] = axes[j][idx[j]];
        points.push_back(std::move(p));
        for (std::size_t j = domain.size(); j-- > 0;) {
            if (++idx[j] < axes[j].size()) break;
            idx[j] = 0;
        }
    }
    return points;
}

}  // namespace hdes
