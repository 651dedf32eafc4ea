#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace hdes {

/// Gate of the hardware-efficient ansatz. Qubit 0 is the most significant bit of a
/// basis index.
struct Gate {
    enum class Kind { Ry, Cnot };

    Kind kind = Kind::Ry;
    int qubit = 0;            // Ry target, or CNOT control
    int target = 0;           // CNOT target
    std::size_t parameter = 0;  // index into the angle vector for Ry
};

/// Layered Ry + braided-CNOT circuit on `qubits` qubits repeated `depth` times.
class CircuitSpec {
public:
    CircuitSpec(int qubits, int depth);

    int qubits() const noexcept { return qubits_; }
    int depth() const noexcept { return depth_; }
    std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(qubits_ * depth_); }
    std::size_t cnot_count() const noexcept;
    const std::vector<Gate>& gates() const noexcept { return gates_; }

private:
    int qubits_;
    int depth_;
    std::vector<Gate> gates_;
};

CircuitSpec build_hea(int qubits, int depth);

/// Real amplitudes of a Ry/CNOT circuit applied to |0...0>.
class Statevector {
public:
    explicit Statevector(int qubits);  // |0...0>
    /// Takes amplitudes verbatim; rejects non-power-of-two sizes and norms off by > 1e-10.
    explicit Statevector(std::vector<double> amplitudes);

    int qubits() const noexcept { return qubits_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }
    std::span<const double> amplitudes() const noexcept { return amplitudes_; }
    std::span<double> amplitudes() noexcept { return amplitudes_; }

    double norm_squared() const noexcept;

private:
    int qubits_;
    std::vector<double> amplitudes_;
};

Statevector simulate(const CircuitSpec& spec, std::span<const double> angles);

std::vector<double> probabilities(const Statevector& sv);

using Counts = std::map<std::uint64_t, std::uint64_t>;

/// Multinomial sample of `shots` measurements in the computational basis.
Counts sample_counts(const Statevector& sv, std::uint64_t shots, std::uint64_t seed);

/// Sampling from an explicit probability vector (same stream as sample_counts).
Counts sample_counts(std::span<const double> probabilities, std::uint64_t shots, std::uint64_t seed);

/// Empirical frequencies counts[i] / shots as a dense vector of length `dimension`.
std::vector<double> empirical_probabilities(const Counts& counts, std::uint64_t shots, std::size_t dimension);

}  // namespace hdes
