#pragma once

#include <cstddef>
#include <vector>

#include "hdes/numeric.hpp"

namespace hdes {

/// Equally spaced sample points including the endpoints (n = 1 gives the midpoint).
/// Multivariate boxes use a tensor grid whose per-axis counts have the product
/// closest to n; the first axis varies slowest. A degenerate axis (lo == hi)
/// contributes the single coordinate lo.
std::vector<Point> generate_samples(std::size_t n, const Box& domain);

/// Per-axis counts chosen by generate_samples.
std::vector<std::size_t> grid_counts(std::size_t n, const Box& domain);

}  // namespace hdes
