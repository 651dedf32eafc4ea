#include "hdes/encoding.hpp"

#include <cmath>
#include <string>

#include "hdes/cheb.hpp"
#include "hdes/error.hpp"
#include "hdes/observable.hpp"

namespace hdes {

namespace {

constexpr double kDropThreshold = 1e-14;

}  // namespace

std::vector<double> decode_coefficients(std::span<const double> p, double lambda) {
    const std::size_t n = p.size();
    if (n < 2 || (n & (n - 1)) != 0) throw ContractError("decode_coefficients: length must be a power of two >= 2");
    double total = 0.0;
    for (double v : p) total += v;
    if (std::fabs(total - 1.0) > 1e-9) throw ContractError("decode_coefficients: probabilities are not normalized");
    const std::size_t half = n / 2;
    std::vector<double> c(half);
    for (std::size_t i = 0; i < half; ++i) c[i] = lambda * (p[i] - p[i + half]);
    return c;
}

EncodedFunction::EncodedFunction(VariableAllocation alloc, int depth, std::vector<double> angles, double lambda,
                                 std::vector<AffineMap> maps)
    : alloc_(std::move(alloc)),
      circuit_(alloc_.total_qubits(), depth),
      angles_(std::move(angles)),
      lambda_(lambda),
      maps_(std::move(maps)) {
    if (angles_.size() != circuit_.parameter_count()) {
        throw ContractError("EncodedFunction: expected " + std::to_string(circuit_.parameter_count()) +
                            " angles, got " + std::to_string(angles_.size()));
    }
    if (!std::isfinite(lambda_) || lambda_ <= 0.0) throw ContractError("EncodedFunction: lambda must be finite and > 0");
    if (!maps_.empty() && maps_.size() != alloc_.variables()) {
        throw ContractError("EncodedFunction: one coordinate map per variable expected");
    }
}

std::vector<double> EncodedFunction::probabilities() const { return hdes::probabilities(simulate(circuit_, angles_)); }

double evaluate(const EncodedFunction& f, std::span<const double> x, const MultiIndex& mi) {
    const DiagonalObservable obs = build_observable(f.allocation(), x, mi, f.maps());
    return f.lambda() * expectation(obs, f.probabilities());
}

SpectralExpansion::SpectralExpansion(std::size_t variables, std::vector<SpectralTerm> terms,
                                     std::vector<AffineMap> maps)
    : variables_(variables), terms_(std::move(terms)), maps_(std::move(maps)) {
    if (variables_ == 0) throw ContractError("SpectralExpansion: needs at least one variable");
    for (const auto& t : terms_) {
        if (t.orders.size() != variables_) throw ContractError("SpectralExpansion: term order arity mismatch");
        for (int k : t.orders) {
            if (k < 0) throw ContractError("SpectralExpansion: negative Chebyshev order");
        }
    }
    if (!maps_.empty() && maps_.size() != variables_) throw ContractError("SpectralExpansion: map arity mismatch");
}

double SpectralExpansion::evaluate(std::span<const double> x, const MultiIndex& mi) const {
    if (x.size() != variables_ || mi.size() != variables_) throw ContractError("SpectralExpansion: arity mismatch");
    std::vector<double> t(x.begin(), x.end());
    double chain = 1.0;
    for (std::size_t j = 0; j < variables_ && !maps_.empty(); ++j) {
        t[j] = maps_[j].apply(x[j]);
        chain *= std::pow(maps_[j].scale, mi[j]);
    }
    double sum = 0.0;
    for (const auto& term : terms_) sum += term.coefficient * cheb_multi_partial(term.orders, mi, t);
    return chain * sum;
}

double SpectralExpansion::evaluate(std::span<const double> x) const {
    return evaluate(x, MultiIndex::zero(variables_));
}

SpectralExpansion to_closed_form(const EncodedFunction& f) {
    const std::vector<double> c = decode_coefficients(f.probabilities(), f.lambda());
    std::vector<SpectralTerm> terms;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (std::fabs(c[i]) < kDropThreshold) continue;
        terms.push_back({index_split(i, f.allocation()).orders, c[i]});
    }
    return SpectralExpansion(f.allocation().variables(), std::move(terms),
                             std::vector<AffineMap>(f.maps().begin(), f.maps().end()));
}

}  // namespace hdes
