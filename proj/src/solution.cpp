#include "hdes/solution.hpp"

#include "hdes/error.hpp"

namespace hdes {

double SolvedFunction::evaluate(std::span<const double> x, const MultiIndex& mi) const {
    double v = expansion.evaluate(x, mi);
    if (!shift.is_zero()) {
        if (x.size() != 1) throw ContractError("shifted solutions must be univariate");
        v -= shift.derivative(x[0], mi[0]);
    }
    return v;
}

double SolvedFunction::evaluate(std::span<const double> x) const {
    return evaluate(x, MultiIndex::zero(x.size()));
}

}  // namespace hdes
