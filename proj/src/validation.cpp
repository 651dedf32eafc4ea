#include "hdes/validation.hpp"

#include <algorithm>
#include <cmath>

#include "hdes/error.hpp"

namespace hdes {

double distance_max(const Field& f, const Field& g, std::span<const Point> sv) {
    if (sv.empty()) throw ContractError("distance_max: empty point set");
    double m = 0.0;
    for (const auto& x : sv) m = std::max(m, std::fabs(f(x) - g(x)));
    return m;
}

double distance_mse(const Field& f, const Field& g, std::span<const Point> sv) {
    if (sv.empty()) throw ContractError("distance_mse: empty point set");
    std::vector<double> sq;
    sq.reserve(sv.size());
    for (const auto& x : sv) {
        const double d = f(x) - g(x);
        sq.push_back(d * d);
    }
    return pairwise_sum(sq) / static_cast<double>(sv.size());
}

FunctionScores score_levels(const SolvedFunction& f, const ReferenceFunction& ref, const std::set<MultiIndex>& orders,
                            std::span<const Point> sv) {
    if (orders.empty()) throw ContractError("score_levels: no derivative orders to score");
    FunctionScores out;
    out.name = f.name;
    for (const auto& mi : orders) {
        if (!ref.supports(mi))
            throw ContractError("reference for '" + f.name + "' lacks derivative order (" + mi.to_string() + ")");
    }
    std::vector<double> seconds;
    out.vf = {0.0, 0.0, ScoreLevel::Function};
    for (const auto& mi : orders) {
        const Field solved = [&](std::span<const double> x) { return f.evaluate(x, mi); };
        const Field expected = [&](std::span<const double> x) { return ref.eval(x, mi); };
        const ValidationScore s{distance_max(solved, expected, sv), distance_mse(solved, expected, sv),
                                ScoreLevel::FunctionOrder};
        out.per_order[mi] = s;
        out.vf.first = std::max(out.vf.first, s.first);
        seconds.push_back(s.second);
    }
    out.vf.second = pairwise_sum(seconds) / static_cast<double>(seconds.size());
    return out;
}

ValidationScore score_global(std::span<const ValidationScore> per_function) {
    if (per_function.empty()) throw ContractError("score_global: no functions");
    ValidationScore v{0.0, 0.0, ScoreLevel::Global};
    std::vector<double> seconds;
    for (const auto& s : per_function) {
        v.first = std::max(v.first, s.first);
        seconds.push_back(s.second);
    }
    v.second = pairwise_sum(seconds) / static_cast<double>(seconds.size());
    return v;
}

SolutionScores score_solution(std::span<const ScoredFunction> functions, const ReferenceSolution& ref,
                              std::span<const Point> sv) {
    SolutionScores out;
    std::vector<ValidationScore> vfs;
    for (const auto& sf : functions) {
        const ReferenceFunction* rf = ref.find(sf.solved.name);
        if (!rf) throw ContractError("reference has no function '" + sf.solved.name + "'");
        out.functions.push_back(score_levels(sf.solved, *rf, sf.orders, sv));
        vfs.push_back(out.functions.back().vf);
    }
    out.global = score_global(vfs);
    return out;
}

}  // namespace hdes
