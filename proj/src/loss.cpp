#include "hdes/loss.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include "hdes/error.hpp"
#include "hdes/samples.hpp"

namespace hdes {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Shot seeds depend on the parameters themselves, so the sampled loss is a
// deterministic function of (run seed, parameters).
std::uint64_t shot_seed(std::uint64_t run_seed, const EncodedFunction& f, std::size_t index) {
    std::uint64_t h = splitmix(run_seed ^ splitmix(index));
    for (double a : f.angles()) h = splitmix(h ^ std::bit_cast<std::uint64_t>(a));
    return splitmix(h ^ std::bit_cast<std::uint64_t>(f.lambda()));
}

std::string point_text(const Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_double(p[i]);
    return s + ")";
}

}  // namespace

std::string to_string(BoundaryStrategy s) {
    switch (s) {
        case BoundaryStrategy::Penalty: return "penalty";
        case BoundaryStrategy::Floating: return "floating";
        case BoundaryStrategy::Tangential: return "tangential";
    }
    return "penalty";
}

BoundaryStrategy parse_strategy(const std::string& text) {
    if (text == "penalty") return BoundaryStrategy::Penalty;
    if (text == "floating") return BoundaryStrategy::Floating;
    if (text == "tangential") return BoundaryStrategy::Tangential;
    throw ContractError("unknown boundary strategy '" + text + "'");
}

struct LossEngine::State {
    std::vector<std::vector<double>> probs;
    std::vector<double> lambda;
    std::vector<ShiftFunction> shift;
    std::vector<std::vector<std::vector<double>>> values;  // [f][order][function point], shifted
};

LossEngine::LossEngine(const DESystem& sys, std::vector<FunctionLayout> layouts, LossConfig cfg)
    : sys_(sys), layouts_(std::move(layouts)), cfg_(std::move(cfg)) {
    const std::size_t nf = sys_.functions.size();
    if (layouts_.size() != nf) throw ContractError("LossEngine: one layout per function required");
    if (!(cfg_.eta >= 0.0) || !std::isfinite(cfg_.eta)) throw ContractError("LossEngine: eta must be finite and >= 0");
    if (cfg_.samples.empty()) throw ContractError("LossEngine: sample set is empty");
    for (const auto& s : cfg_.samples)
        if (s.size() != sys_.variables.size()) throw ContractError("LossEngine: sample dimension mismatch");
    for (std::size_t f = 0; f < nf; ++f) {
        const auto& lay = layouts_[f];
        if (lay.alloc.variables() != sys_.functions[f].variables.size())
            throw ContractError("LossEngine: allocation of '" + sys_.functions[f].name + "' has the wrong variable count");
        if (lay.depth < 1) throw ContractError("LossEngine: depth must be >= 1");
        if (!lay.maps.empty() && lay.maps.size() != lay.alloc.variables())
            throw ContractError("LossEngine: one coordinate map per variable required");
        offsets_.push_back(parameter_count_);
        parameter_count_ += lay.parameter_count();
    }

    points_ = cfg_.samples;
    const bool univariate_system = sys_.variables.size() == 1;

    // Decide how each boundary condition is enforced.
    for (const auto& bc : sys_.boundary_conditions) {
        const bool univariate = sys_.functions[bc.function].variables.size() == 1;
        BoundaryHandling h = BoundaryHandling::Penalty;
        if (cfg_.strategy != BoundaryStrategy::Penalty && bc.is_value() && univariate) h = BoundaryHandling::Floating;
        if (cfg_.strategy == BoundaryStrategy::Tangential && bc.order.total() == 1 && univariate && univariate_system)
            h = BoundaryHandling::Tangential;
        handling_.push_back(h);
    }

    // Tangential anchors: x0 joins the evaluation points, x1 is the adjacent sample.
    std::vector<double> coords;
    if (univariate_system) {
        for (const auto& s : cfg_.samples) coords.push_back(s[0]);
        std::sort(coords.begin(), coords.end());
        coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    }
    auto find_point = [&](double x) {
        for (std::size_t i = 0; i < points_.size(); ++i)
            if (points_[i][0] == x) return i;
        return kNone;
    };
    struct PendingTangential {
        std::size_t function, anchor, neighbor_point;
        double x0, x1, k0;
    };
    std::vector<PendingTangential> pending;
    for (std::size_t b = 0; b < handling_.size(); ++b) {
        if (handling_[b] != BoundaryHandling::Tangential) continue;
        const auto& bc = sys_.boundary_conditions[b];
        const double x0 = bc.point[0];
        const Interval dom = sys_.variables[0].domain;
        double x1 = 0.0;
        if (x0 == dom.hi) {
            const auto it = std::lower_bound(coords.begin(), coords.end(), x0);
            if (it == coords.begin()) throw ContractError("tangential: no sample before x0 = " + format_double(x0));
            x1 = *std::prev(it);
        } else {
            const auto it = std::upper_bound(coords.begin(), coords.end(), x0);
            if (it == coords.end()) throw ContractError("tangential: no sample after x0 = " + format_double(x0));
            x1 = *it;
        }
        if (!dom.contains(x1, 0.0)) throw ContractError("tangential: x1 outside the domain");
        std::size_t anchor = find_point(x0);
        if (anchor == kNone) {
            points_.push_back(Point{x0});
            anchor = points_.size() - 1;
        }
        for (const auto& p : pending)
            if (p.function == bc.function && p.anchor == anchor)
                throw ContractError("tangential: two derivative conditions on one function at the same point");
        pending.push_back({bc.function, anchor, find_point(x1), x0, x1, bc.value});
    }

    // Per-function observables over the projected evaluation points.
    per_function_.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        PerFunction& pf = per_function_[f];
        const std::size_t nv = sys_.functions[f].variables.size();
        for (const Slot& s : sys_.slots)
            if (s.function == f && std::find(pf.orders.begin(), pf.orders.end(), s.order) == pf.orders.end())
                pf.orders.push_back(s.order);
        const MultiIndex zero = MultiIndex::zero(nv);
        if (std::find(pf.orders.begin(), pf.orders.end(), zero) == pf.orders.end()) pf.orders.push_back(zero);

        std::map<Point, std::size_t> seen;
        for (const auto& p : points_) {
            Point q = sys_.project(f, p);
            auto [it, inserted] = seen.emplace(q, pf.points.size());
            if (inserted) pf.points.push_back(std::move(q));
            pf.point_of_sample.push_back(it->second);
        }
        pf.table = generate_observables(pf.orders, pf.points, layouts_[f].alloc, layouts_[f].maps);

        std::vector<double> abscissae;
        for (std::size_t b = 0; b < handling_.size(); ++b) {
            const auto& bc = sys_.boundary_conditions[b];
            if (bc.function != f || handling_[b] != BoundaryHandling::Floating) continue;
            if (std::find(abscissae.begin(), abscissae.end(), bc.point[0]) != abscissae.end())
                throw ContractError("floating: duplicate boundary abscissa for '" + sys_.functions[f].name + "'");
            abscissae.push_back(bc.point[0]);
            pf.floating_bcs.push_back(b);
            pf.floating_obs.push_back(build_observable(layouts_[f].alloc, bc.point, zero, layouts_[f].maps));
        }
    }

    slot_order_index_.resize(sys_.slots.size());
    for (std::size_t k = 0; k < sys_.slots.size(); ++k) {
        const auto& orders = per_function_[sys_.slots[k].function].orders;
        slot_order_index_[k] =
            static_cast<std::size_t>(std::find(orders.begin(), orders.end(), sys_.slots[k].order) - orders.begin());
    }

    for (std::size_t b = 0; b < handling_.size(); ++b) {
        if (handling_[b] != BoundaryHandling::Penalty) continue;
        const auto& bc = sys_.boundary_conditions[b];
        penalty_bcs_.push_back(b);
        penalty_obs_.push_back(build_observable(layouts_[bc.function].alloc, bc.point, bc.order,
                                                layouts_[bc.function].maps));
    }

    overridden_point_.assign(points_.size(), false);
    for (const auto& p : pending) {
        tangential_.push_back({p.function, p.anchor, per_function_[p.function].point_of_sample.at(p.neighbor_point),
                               p.x0, p.x1, p.k0});
        overridden_point_[p.anchor] = true;
    }

    // Linear single-function equations: fold sum_k a_k(x) O_k into one observable per point.
    const std::size_t ne = sys_.equations.size();
    eq_slots_.resize(ne);
    eq_regroup_.assign(ne, false);
    regrouped_.resize(ne);
    std::vector<double> slot_values(sys_.slots.size(), 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
        const Expr& expr = *sys_.equations[e].expr;
        eq_slots_[e] = referenced_slots(expr);
        if (!cfg_.regroup || !is_linear_single_function(expr)) continue;
        eq_regroup_[e] = true;
        const std::size_t f = sys_.slots[eq_slots_[e].front()].function;
        const PerFunction& pf = per_function_[f];
        regrouped_[e].resize(points_.size());
        for (std::size_t s = 0; s < points_.size(); ++s) {
            if (overridden_point_[s]) continue;
            Regrouped& r = regrouped_[e][s];
            std::fill(slot_values.begin(), slot_values.end(), 0.0);
            r.constant = evaluate_expr(expr, slot_values, points_[s]);
            std::vector<WeightedObservable> terms;
            for (std::size_t k : eq_slots_[e]) {
                slot_values[k] = 1.0;
                const double a = evaluate_expr(expr, slot_values, points_[s]) - r.constant;
                slot_values[k] = 0.0;
                r.slot_weights.push_back(a);
                terms.emplace_back(a, pf.table.at(sys_.slots[k].order, pf.point_of_sample[s]));
            }
            const DiagonalObservable combined = combine_linear(terms);
            r.diag.assign(combined.diag().begin(), combined.diag().end());
        }
    }
}

std::vector<EncodedFunction> LossEngine::decode(std::span<const double> params) const {
    if (params.size() != parameter_count_)
        throw ContractError("LossEngine: expected " + std::to_string(parameter_count_) + " parameters, got " +
                            std::to_string(params.size()));
    std::vector<EncodedFunction> out;
    for (std::size_t f = 0; f < layouts_.size(); ++f) {
        const auto& lay = layouts_[f];
        const std::size_t n = lay.parameter_count() - 1;
        const auto block = params.subspan(offsets_[f], n + 1);
        out.emplace_back(lay.alloc, lay.depth, std::vector<double>(block.begin(), block.begin() + n),
                         std::exp(block[n]), lay.maps);
    }
    return out;
}

LossEngine::State LossEngine::prepare(std::span<const EncodedFunction> fns) const {
    if (fns.size() != layouts_.size()) throw ContractError("LossEngine: one encoded function per system function");
    State st;
    for (std::size_t f = 0; f < fns.size(); ++f) {
        if (fns[f].allocation() != layouts_[f].alloc)
            throw ContractError("LossEngine: encoded function allocation does not match its layout");
        std::vector<double> p = fns[f].probabilities();
        if (cfg_.shots > 0) {
            const Counts c = sample_counts(p, cfg_.shots, shot_seed(cfg_.seed, fns[f], f));
            p = empirical_probabilities(c, cfg_.shots, p.size());
        }
        st.probs.push_back(std::move(p));
        st.lambda.push_back(fns[f].lambda());
    }
    for (std::size_t f = 0; f < fns.size(); ++f) {
        const PerFunction& pf = per_function_[f];
        ShiftFunction shift;
        if (!pf.floating_bcs.empty()) {
            std::vector<double> xs, attempt, targets;
            for (std::size_t j = 0; j < pf.floating_bcs.size(); ++j) {
                const auto& bc = sys_.boundary_conditions[pf.floating_bcs[j]];
                xs.push_back(bc.point[0]);
                attempt.push_back(st.lambda[f] * expectation(pf.floating_obs[j], st.probs[f]));
                targets.push_back(bc.value);
            }
            shift = floating_shift(xs, attempt, targets);
        }
        std::vector<std::vector<double>> vals(pf.orders.size(), std::vector<double>(pf.points.size()));
        for (std::size_t o = 0; o < pf.orders.size(); ++o) {
            for (std::size_t fp = 0; fp < pf.points.size(); ++fp) {
                double v = st.lambda[f] * expectation(pf.table.at(pf.orders[o], fp), st.probs[f]);
                if (!shift.is_zero()) v -= shift.derivative(pf.points[fp][0], pf.orders[o][0]);
                vals[o][fp] = v;
            }
        }
        st.values.push_back(std::move(vals));
        st.shift.push_back(std::move(shift));
    }
    return st;
}

std::vector<double> LossEngine::residuals(const State& st) const {
    const std::size_t ne = sys_.equations.size();
    const std::size_t np = points_.size();
    std::vector<double> out(ne * np);
    std::vector<double> slot_values(sys_.slots.size(), 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
        const Expr& expr = *sys_.equations[e].expr;
        for (std::size_t s = 0; s < np; ++s) {
            if (eq_regroup_[e] && !overridden_point_[s]) {
                const Regrouped& r = regrouped_[e][s];
                const std::size_t f = sys_.slots[eq_slots_[e].front()].function;
                double v = st.lambda[f] * dot(r.diag, st.probs[f]) + r.constant;
                if (!st.shift[f].is_zero()) {
                    const double x = per_function_[f].points[per_function_[f].point_of_sample[s]][0];
                    for (std::size_t j = 0; j < eq_slots_[e].size(); ++j)
                        v -= r.slot_weights[j] * st.shift[f].derivative(x, sys_.slots[eq_slots_[e][j]].order[0]);
                }
                out[e * np + s] = v;
                continue;
            }
            for (std::size_t k : eq_slots_[e]) {
                const std::size_t f = sys_.slots[k].function;
                slot_values[k] = st.values[f][slot_order_index_[k]][per_function_[f].point_of_sample[s]];
            }
            for (const auto& t : tangential_) {
                if (t.anchor_point != s) continue;
                for (std::size_t k : eq_slots_[e]) {
                    const Slot& slot = sys_.slots[k];
                    if (slot.function != t.function) continue;
                    if (slot.order.is_zero()) {
                        const std::size_t zero_idx = slot_order_index_[k];
                        slot_values[k] = st.values[t.function][zero_idx][t.neighbor_fp] - t.k0 * (t.x1 - t.x0);
                    } else if (slot.order.total() == 1) {
                        slot_values[k] = t.k0;
                    }
                }
            }
            try {
                out[e * np + s] = evaluate_expr(expr, slot_values, points_[s]);
            } catch (const EvaluationError& err) {
                throw EvaluationError("equation " + std::to_string(e + 1) + " at x = " + point_text(points_[s]) +
                                      ": " + err.what());
            }
        }
    }
    return out;
}

std::vector<double> LossEngine::residuals(std::span<const EncodedFunction> fns) const { return residuals(prepare(fns)); }

std::vector<ShiftFunction> LossEngine::shifts(std::span<const EncodedFunction> fns) const { return prepare(fns).shift; }

LossBreakdown LossEngine::evaluate(std::span<const EncodedFunction> fns) const {
    const State st = prepare(fns);
    std::vector<double> r = residuals(st);
    for (double& v : r) v *= v;
    LossBreakdown out;
    out.diff = pairwise_sum(r) / static_cast<double>(points_.size());
    if (!penalty_bcs_.empty()) {
        std::vector<double> sq;
        for (std::size_t j = 0; j < penalty_bcs_.size(); ++j) {
            const auto& bc = sys_.boundary_conditions[penalty_bcs_[j]];
            const std::size_t f = bc.function;
            double v = st.lambda[f] * expectation(penalty_obs_[j], st.probs[f]);
            if (!st.shift[f].is_zero()) v -= st.shift[f].derivative(bc.point[0], bc.order[0]);
            sq.push_back((v - bc.value) * (v - bc.value));
        }
        out.boundaries = pairwise_sum(sq) / static_cast<double>(sq.size());
        out.total = out.diff + cfg_.eta * out.boundaries;
    } else {
        out.total = out.diff;
    }
    return out;
}

LossBreakdown LossEngine::evaluate(std::span<const double> params) const {
    for (std::size_t f = 0; f < layouts_.size(); ++f) {
        const double s = params[offsets_[f] + layouts_[f].parameter_count() - 1];
        const double lambda = std::exp(s);
        if (!std::isfinite(lambda) || lambda <= 0.0) {
            const double inf = std::numeric_limits<double>::infinity();
            return {inf, inf, inf};
        }
    }
    const std::vector<EncodedFunction> fns = decode(params);
    return evaluate(fns);
}

std::vector<FunctionLayout> layouts_of(std::span<const EncodedFunction> fns) {
    std::vector<FunctionLayout> out;
    for (const auto& f : fns)
        out.push_back({f.allocation(), f.circuit().depth(), std::vector<AffineMap>(f.maps().begin(), f.maps().end())});
    return out;
}

double loss_diff(const DESystem& sys, std::span<const EncodedFunction> fns, const std::vector<Point>& samples) {
    LossConfig cfg;
    cfg.samples = samples;
    return LossEngine(sys, layouts_of(fns), cfg).evaluate(fns).diff;
}

double loss_boundaries(const DESystem& sys, std::span<const EncodedFunction> fns) {
    LossConfig cfg;
    cfg.samples = generate_samples(1, sys.domain());
    return LossEngine(sys, layouts_of(fns), cfg).evaluate(fns).boundaries;
}

double total_loss(const DESystem& sys, std::span<const EncodedFunction> fns, const LossConfig& cfg) {
    return LossEngine(sys, layouts_of(fns), cfg).evaluate(fns).total;
}

}  // namespace hdes
