#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hdes {

using Point = std::vector<double>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double x, double tol = 1e-12) const noexcept { return x >= lo - tol && x <= hi + tol; }
};

using Box = std::vector<Interval>;

/// Pairwise (cascade) summation. The split points depend only on the length, so the
/// result is bitwise reproducible for a given input order.
double pairwise_sum(std::span<const double> values);

double dot(std::span<const double> a, std::span<const double> b);

/// n equally spaced values including both endpoints; n == 1 yields the midpoint.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// printf-style "%.17g", used for CSV output.
std::string format_double17(double value);

/// Worker cap from HDES_THREADS (falls back to hardware concurrency, at least 1).
std::size_t worker_count();

}  // namespace hdes
