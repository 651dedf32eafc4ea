#pragma once

#include <span>
#include <string>
#include <vector>

#include "hdes/encoding.hpp"
#include "hdes/multi_index.hpp"
#include "hdes/shift.hpp"

namespace hdes {

/// Classical form of a solved function: its Chebyshev expansion minus the floating
/// shift (zero unless floating boundary handling was used).
struct SolvedFunction {
    std::string name;
    std::vector<std::string> variables;
    SpectralExpansion expansion;
    ShiftFunction shift;

    double evaluate(std::span<const double> x, const MultiIndex& mi) const;
    double evaluate(std::span<const double> x) const;
};

}  // namespace hdes
