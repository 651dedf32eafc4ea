#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hdes/multi_index.hpp"
#include "hdes/numeric.hpp"
#include "hdes/reference.hpp"
#include "hdes/solution.hpp"

namespace hdes {

enum class ScoreLevel { FunctionOrder, Function, Global };

/// (max-style error, mean-squared error)
struct ValidationScore {
    double first = 0.0;
    double second = 0.0;
    ScoreLevel level = ScoreLevel::FunctionOrder;
};

using Field = std::function<double(std::span<const double>)>;

double distance_max(const Field& f, const Field& g, std::span<const Point> sv);
double distance_mse(const Field& f, const Field& g, std::span<const Point> sv);

struct FunctionScores {
    std::string name;
    std::map<MultiIndex, ValidationScore> per_order;
    ValidationScore vf;
};

/// V_{f,i} for every i in orders, and V_f = (max_i first, mean_i second).
/// Throws ContractError if the reference lacks one of the orders.
FunctionScores score_levels(const SolvedFunction& f, const ReferenceFunction& ref, const std::set<MultiIndex>& orders,
                            std::span<const Point> sv);

/// V from per-function V_f: (max first, mean second).
ValidationScore score_global(std::span<const ValidationScore> per_function);

struct SolutionScores {
    std::vector<FunctionScores> functions;
    ValidationScore global;
};

struct ScoredFunction {
    SolvedFunction solved;
    std::set<MultiIndex> orders;
};

SolutionScores score_solution(std::span<const ScoredFunction> functions, const ReferenceSolution& ref,
                              std::span<const Point> sv);

}  // namespace hdes
