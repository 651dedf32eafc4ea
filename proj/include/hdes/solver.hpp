#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hdes/allocation.hpp"
#include "hdes/encoding.hpp"
#include "hdes/loss.hpp"
#include "hdes/solution.hpp"
#include "hdes/system.hpp"

namespace hdes {

struct FunctionSettings {
    std::optional<int> qubits;  // total register size N
    std::vector<int> qubits_per_variable;  // explicit l_j; overrides `qubits`
    std::optional<int> depth;
};

struct SolverConfig {
    int qubits = 4;
    int depth = 3;
    std::map<std::string, FunctionSettings> per_function;
    std::size_t samples = 20;
    std::size_t max_iterations = 200;
    double target_loss = 1e-6;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    BoundaryStrategy strategy = BoundaryStrategy::Penalty;
    double eta = 10.0;
    /// Map every variable's domain onto [-1, 1] before Chebyshev evaluation.
    bool rescale = false;
    bool regroup = true;
    /// Threads for finite-difference gradients inside one solve.
    std::size_t workers = 1;

    /// Throws ContractError when a field is outside its documented range.
    void validate() const;
};

/// Defaults overlaid with the problem file's `option` statements.
SolverConfig config_from_problem(const DESystem& sys);

std::vector<FunctionLayout> build_layouts(const DESystem& sys, const SolverConfig& cfg);

/// Per function: N*d angles uniform in [0, 2pi), then s uniform in [0, ln 10].
std::vector<double> init_params(const DESystem& sys, const SolverConfig& cfg, std::uint64_t seed);

struct FunctionResult {
    std::string name;
    std::vector<std::string> variables;
    VariableAllocation alloc{std::vector<int>{1}};
    int depth = 1;
    std::vector<double> angles;
    double lambda = 1.0;
    std::vector<AffineMap> maps;
    std::set<MultiIndex> orders;  // G_F
    SpectralExpansion expansion;
    ShiftFunction shift;

    SolvedFunction solved() const { return {name, variables, expansion, shift}; }
};

struct SolveResult {
    std::vector<FunctionResult> functions;
    std::vector<double> parameters;
    double final_loss = 0.0;
    std::vector<double> loss_trace;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    std::string termination;
    std::uint64_t seed = 0;
};

LossEngine make_loss_engine(const DESystem& sys, const SolverConfig& cfg);

SolveResult solve(const DESystem& sys, const SolverConfig& cfg);

struct MultiStartSummary {
    std::vector<Point> samples;
    /// [function][sample]
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> stddev;
    std::vector<double> final_losses;
    double best_loss = 0.0;
    double median_loss = 0.0;
    double mean_loss = 0.0;
    std::size_t best_index = 0;
};

struct MultiStartResult {
    std::vector<SolveResult> runs;
    MultiStartSummary summary;
};

/// Solves with seeds seed .. seed + restarts - 1, concurrently up to worker_count().
MultiStartResult multi_start(const DESystem& sys, const SolverConfig& cfg, std::size_t restarts);

}  // namespace hdes
