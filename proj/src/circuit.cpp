#include "hdes/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hdes/error.hpp"

namespace hdes {

namespace {

constexpr int kMaxQubits = 24;

std::size_t bit_of(int qubits, int qubit) { return std::size_t{1} << (qubits - 1 - qubit); }

void apply_ry(std::span<double> amps, int qubits, int qubit, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const std::size_t bit = bit_of(qubits, qubit);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & bit) continue;
        const double a0 = amps[i];
        const double a1 = amps[i | bit];
        amps[i] = c * a0 - s * a1;
        amps[i | bit] = s * a0 + c * a1;
    }
}

void apply_cnot(std::span<double> amps, int qubits, int control, int target) {
    const std::size_t cbit = bit_of(qubits, control);
    const std::size_t tbit = bit_of(qubits, target);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
    }
}

}  // namespace

CircuitSpec::CircuitSpec(int qubits, int depth) : qubits_(qubits), depth_(depth) {
    if (qubits < 1 || qubits > kMaxQubits) {
        throw ContractError("circuit needs 1.." + std::to_string(kMaxQubits) + " qubits, got " +
                            std::to_string(qubits));
    }
    if (depth < 1) throw ContractError("circuit depth must be at least 1");
    std::size_t param = 0;
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = 0; q < qubits; ++q) gates_.push_back({Gate::Kind::Ry, q, q, param++});
        // Braided entangler: even pairs then odd pairs, linear connectivity.
        for (int start : {0, 1}) {
            for (int q = start; q + 1 < qubits; q += 2) gates_.push_back({Gate::Kind::Cnot, q, q + 1, 0});
        }
    }
}

std::size_t CircuitSpec::cnot_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(gates_.begin(), gates_.end(), [](const Gate& g) { return g.kind == Gate::Kind::Cnot; }));
}

CircuitSpec build_hea(int qubits, int depth) { return CircuitSpec(qubits, depth); }

Statevector::Statevector(int qubits) : qubits_(qubits) {
    if (qubits < 1 || qubits > kMaxQubits) throw ContractError("statevector qubit count out of range");
    amplitudes_.assign(std::size_t{1} << qubits, 0.0);
    amplitudes_[0] = 1.0;
}

Statevector::Statevector(std::vector<double> amplitudes) : qubits_(0), amplitudes_(std::move(amplitudes)) {
    const std::size_t n = amplitudes_.size();
    if (n < 2 || (n & (n - 1)) != 0) throw ContractError("statevector length must be a power of two >= 2");
    while ((std::size_t{1} << qubits_) < n) ++qubits_;
    if (std::fabs(norm_squared() - 1.0) > 1e-10) throw ContractError("statevector is not normalized");
}

double Statevector::norm_squared() const noexcept {
    double s = 0.0;
    for (double a : amplitudes_) s += a * a;
    return s;
}

Statevector simulate(const CircuitSpec& spec, std::span<const double> angles) {
    if (angles.size() != spec.parameter_count()) {
        throw ContractError("simulate: expected " + std::to_string(spec.parameter_count()) + " angles, got " +
                            std::to_string(angles.size()));
    }
    Statevector sv(spec.qubits());
    auto amps = sv.amplitudes();
    for (const Gate& g : spec.gates()) {
        if (g.kind == Gate::Kind::Ry) {
            apply_ry(amps, spec.qubits(), g.qubit, angles[g.parameter]);
        } else {
            apply_cnot(amps, spec.qubits(), g.qubit, g.target);
        }
    }
    return sv;
}

std::vector<double> probabilities(const Statevector& sv) {
    std::vector<double> p(sv.dimension());
    const auto amps = sv.amplitudes();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = amps[i] * amps[i];
    return p;
}

Counts sample_counts(std::span<const double> probs, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) throw ContractError("sample_counts: shots must be positive");
    std::mt19937_64 rng(seed);
    Counts counts;
    // Conditional binomial decomposition of the multinomial.
    std::size_t last = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) last = i;
        total += std::max(0.0, probs[i]);
    }
    if (!(total > 0.0)) throw ContractError("sample_counts: probabilities sum to zero");
    std::uint64_t remaining = shots;
    double mass_left = total;
    for (std::size_t i = 0; i <= last && remaining > 0; ++i) {
        const double p = std::max(0.0, probs[i]);
        std::uint64_t k = 0;
        if (i == last || p >= mass_left) {
            k = remaining;
        } else if (p > 0.0) {
            std::binomial_distribution<std::uint64_t> draw(remaining, std::clamp(p / mass_left, 0.0, 1.0));
            k = draw(rng);
        }
        if (k > 0) counts[i] = k;
        remaining -= k;
        mass_left -= p;
    }
    return counts;
}

Counts sample_counts(const Statevector& sv, std::uint64_t shots, std::uint64_t seed) {
    return sample_counts(probabilities(sv), shots, seed);
}

std::vector<double> empirical_probabilities(const Counts& counts, std::uint64_t shots, std::size_t dimension) {
    if (shots == 0) throw ContractError("empirical_probabilities: shots must be positive");
    std::vector<double> p(dimension, 0.0);
    for (const auto& [index, count] : counts) {
        if (index >= dimension) throw ContractError("empirical_probabilities: basis index out of range");
        p[index] = static_cast<double>(count) / static_cast<double>(shots);
    }
    return p;
}

}  // namespace hdes
