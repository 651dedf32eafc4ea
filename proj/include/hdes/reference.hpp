#pragma once

#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hdes/multi_index.hpp"
#include "hdes/numeric.hpp"

namespace hdes {

enum class ReferenceKind { ClosedForm, Rk4, Tabulated };

std::string to_string(ReferenceKind k);

using FieldEvaluator = std::function<double(std::span<const double> x, const MultiIndex& mi)>;

struct ReferenceFunction {
    std::string name;
    std::set<MultiIndex> orders;  // derivative orders the evaluator supports
    FieldEvaluator eval;

    bool supports(const MultiIndex& mi) const { return orders.count(mi) > 0; }
};

/// Expected solution c_f for every function of a system.
struct ReferenceSolution {
    ReferenceKind kind = ReferenceKind::ClosedForm;
    std::vector<ReferenceFunction> functions;

    /// nullptr when absent.
    const ReferenceFunction* find(const std::string& name) const;
};

/// Reference read from CSV text. The header names the coordinate columns
/// (`coordinates`, in order) followed by value columns `f` and derivative columns
/// `f_d<counts joined by _>` (e.g. `f_d1`, `g_d1_0`). Lookups match rows whose
/// coordinates agree within 1e-12; univariate tables interpolate linearly between
/// rows otherwise. Throws ContractError on malformed tables.
ReferenceSolution tabulated_reference(const std::string& csv_text, const std::vector<std::string>& coordinates);

/// Column name for a function/derivative pair in tabulated references and curve output.
std::string column_name(const std::string& function, const MultiIndex& mi);

}  // namespace hdes
