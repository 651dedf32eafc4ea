#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdes/allocation.hpp"
#include "hdes/encoding.hpp"
#include "hdes/numeric.hpp"
#include "hdes/observable.hpp"
#include "hdes/shift.hpp"
#include "hdes/system.hpp"

namespace hdes {

enum class BoundaryStrategy { Penalty, Floating, Tangential };

std::string to_string(BoundaryStrategy s);
/// "penalty" | "floating" | "tangential"; ContractError otherwise.
BoundaryStrategy parse_strategy(const std::string& text);

/// How one boundary condition is enforced under the configured strategy.
enum class BoundaryHandling { Penalty, Floating, Tangential };

struct LossConfig {
    double eta = 10.0;
    BoundaryStrategy strategy = BoundaryStrategy::Penalty;
    /// Sample set S in system coordinates (one entry per system variable).
    std::vector<Point> samples;
    /// Combine the observables of single-function linear equations into one.
    bool regroup = true;
    /// 0 evaluates expectations exactly; otherwise from `shots` sampled measurements.
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

/// Static description of one trial function: its register and ansatz depth.
struct FunctionLayout {
    VariableAllocation alloc{std::vector<int>{1}};
    int depth = 1;
    std::vector<AffineMap> maps;  // empty: coordinates used unmapped

    /// N*d angles followed by the log-scale s.
    std::size_t parameter_count() const {
        return static_cast<std::size_t>(alloc.total_qubits() * depth) + 1;
    }
};

struct LossBreakdown {
    double diff = 0.0;
    double boundaries = 0.0;  // mean squared error of penalty-handled conditions
    double total = 0.0;
};

/// Total loss L_diff + eta * L_boundaries for a parsed system. Observables for every
/// (function, order, point) are built once at construction.
class LossEngine {
public:
    LossEngine(const DESystem& sys, std::vector<FunctionLayout> layouts, LossConfig cfg);

    const DESystem& system() const noexcept { return sys_; }
    const LossConfig& config() const noexcept { return cfg_; }
    const std::vector<FunctionLayout>& layouts() const noexcept { return layouts_; }
    std::size_t parameter_count() const noexcept { return parameter_count_; }
    /// Offset of function f's block in the parameter vector.
    std::size_t parameter_offset(std::size_t f) const { return offsets_.at(f); }

    /// S plus any tangential anchor points not already sampled; n_s is its size.
    const std::vector<Point>& evaluation_points() const noexcept { return points_; }
    const std::vector<BoundaryHandling>& handling() const noexcept { return handling_; }

    /// Splits a parameter vector into encoded functions (lambda = exp(s)).
    std::vector<EncodedFunction> decode(std::span<const double> params) const;

    LossBreakdown evaluate(std::span<const double> params) const;
    LossBreakdown evaluate(std::span<const EncodedFunction> fns) const;
    double operator()(std::span<const double> params) const { return evaluate(params).total; }

    /// Floating shifts of the attempt (zero for functions without floating conditions).
    std::vector<ShiftFunction> shifts(std::span<const EncodedFunction> fns) const;

    /// Residual e(x_s) for every equation and evaluation point, equation-major.
    std::vector<double> residuals(std::span<const EncodedFunction> fns) const;

private:
    struct Tangential {
        std::size_t function;
        std::size_t anchor_point;  // evaluation point index of x0
        std::size_t neighbor_fp;   // function-point index of x1
        double x0, x1, k0;
    };
    struct Regrouped {
        std::vector<double> diag;              // sum_k a_k O_k
        double constant = 0.0;                 // b
        std::vector<double> slot_weights;      // a_k, aligned with the equation's slots
    };
    struct PerFunction {
        std::vector<MultiIndex> orders;
        std::vector<Point> points;                  // projected, deduplicated
        std::vector<std::size_t> point_of_sample;   // evaluation point -> function point
        ObservableTable table{{}, {}, {}};
        std::vector<std::size_t> floating_bcs;
        std::vector<DiagonalObservable> floating_obs;  // value observables at floating abscissae
    };

    struct State;
    State prepare(std::span<const EncodedFunction> fns) const;
    std::vector<double> residuals(const State& st) const;

    DESystem sys_;
    std::vector<FunctionLayout> layouts_;
    LossConfig cfg_;
    std::vector<std::size_t> offsets_;
    std::size_t parameter_count_ = 0;
    std::vector<Point> points_;
    std::vector<BoundaryHandling> handling_;
    std::vector<PerFunction> per_function_;
    std::vector<std::size_t> slot_order_index_;  // slot -> index into its function's orders
    std::vector<std::size_t> penalty_bcs_;
    std::vector<DiagonalObservable> penalty_obs_;
    std::vector<Tangential> tangential_;
    std::vector<std::vector<std::size_t>> eq_slots_;
    std::vector<bool> eq_regroup_;
    std::vector<std::vector<Regrouped>> regrouped_;  // [equation][point]
    std::vector<bool> overridden_point_;
};

/// (1/n_s) sum_e sum_s e(x_s)^2 with the system's boundary conditions ignored.
double loss_diff(const DESystem& sys, std::span<const EncodedFunction> fns, const std::vector<Point>& samples);

/// (1/n_BC) sum over all conditions of the squared mismatch.
double loss_boundaries(const DESystem& sys, std::span<const EncodedFunction> fns);

double total_loss(const DESystem& sys, std::span<const EncodedFunction> fns, const LossConfig& cfg);

/// Layouts matching already-built encoded functions.
std::vector<FunctionLayout> layouts_of(std::span<const EncodedFunction> fns);

}  // namespace hdes
