#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdes/solver.hpp"
#include "hdes/system.hpp"
#include "hdes/validation.hpp"

namespace hdes {

using Json = nlohmann::json;

Json config_to_json(const SolverConfig& cfg, std::size_t restarts);

/// Full result document. `multi` adds the restart summary; `result` should then be
/// its best run.
Json result_to_json(const SolveResult& result, const DESystem& sys, const std::string& source, const Json& config_echo,
                    const MultiStartResult* multi = nullptr);

/// A result document read back from JSON.
struct ResultDocument {
    std::string source;
    DESystem system;
    std::vector<FunctionResult> functions;
    double final_loss = 0.0;
    std::size_t iterations = 0;
    std::string termination;
    std::vector<double> loss_trace;
    std::uint64_t seed = 0;
    Json config_echo;
    std::optional<Json> multi_start;

    std::vector<ScoredFunction> scored() const;
};

/// Throws ContractError on missing or mistyped fields, ParseError if the embedded
/// problem does not parse.
ResultDocument result_from_json(const Json& j);

Json scores_to_json(const SolutionScores& scores);

}  // namespace hdes
