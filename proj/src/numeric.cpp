#include "hdes/numeric.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "hdes/error.hpp"

namespace hdes {

namespace {

double pairwise_impl(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_impl(data, half) + pairwise_impl(data + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise_impl(values.data(), values.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) throw ContractError("linspace: n must be positive");
    if (n == 1) return {0.5 * (lo + hi)};
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw ContractError("format_double: conversion failed");
    return std::string(buf, ptr);
}

std::string format_double17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::size_t worker_count() {
    std::size_t n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("HDES_THREADS")) {
        const long requested = std::strtol(env, nullptr, 10);
        if (requested > 0) n = static_cast<std::size_t>(requested);
    }
    return n == 0 ? 1 : n;
}

}  // namespace hdes
