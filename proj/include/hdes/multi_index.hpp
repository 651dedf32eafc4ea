#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace hdes {

/// Per-variable derivative counts of a partial derivative, e.g. (1, 0) for d/dx of f(x, y).
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> counts);

    static MultiIndex zero(std::size_t variables);
    static MultiIndex along(std::size_t variables, std::size_t axis, int order);

    std::size_t size() const noexcept { return counts_.size(); }
    int operator[](std::size_t axis) const { return counts_.at(axis); }
    const std::vector<int>& counts() const noexcept { return counts_; }

    /// Total order g.
    int total() const noexcept;
    /// Number of distinct differentiated variables h.
    int distinct() const noexcept;
    bool is_zero() const noexcept { return total() == 0; }

    /// "1,0" style key.
    std::string to_string() const;
    static MultiIndex from_string(const std::string& text);

    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;

private:
    std::vector<int> counts_;
};

}  // namespace hdes
