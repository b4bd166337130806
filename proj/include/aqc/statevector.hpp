#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "aqc/circuit.hpp"
#include "aqc/common.hpp"

namespace aqc {

/// 2^n complex amplitudes, little-endian: qubit q is bit q of the basis index.
struct StateVector {
    std::size_t n_qubits = 0;
    std::vector<cplx> amps;

    StateVector() = default;
    explicit StateVector(std::size_t n) : n_qubits(n), amps(std::size_t{1} << n, cplx{}) {}

    static StateVector zero_state(std::size_t n) {
        StateVector s(n);
        s.amps[0] = 1.0;
        return s;
    }
    static StateVector basis_state(std::size_t n, std::uint64_t index) {
        StateVector s(n);
        s.amps.at(index) = 1.0;
        return s;
    }

    std::size_t dim() const { return amps.size(); }
    double norm_sq() const;
};

/// d x d complex matrix, row-major. Unitarity is the caller's contract;
/// max_unitarity_residual() measures it.
struct DenseUnitary {
    std::size_t dim = 0;
    std::vector<cplx> a;  // a[row * dim + col]

    DenseUnitary() = default;
    explicit DenseUnitary(std::size_t d) : dim(d), a(d * d, cplx{}) {}

    static DenseUnitary identity(std::size_t d) {
        DenseUnitary u(d);
        for (std::size_t i = 0; i < d; ++i) u.a[i * d + i] = 1.0;
        return u;
    }

    cplx& at(std::size_t r, std::size_t c) { return a[r * dim + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return a[r * dim + c]; }

    double max_unitarity_residual() const;
};

/// Batch of column vectors sharing one qubit register; column-major storage.
/// Used wherever a circuit acts on many states at once (dense unitaries,
/// trace-based costs).
struct StateBatch {
    std::size_t n_qubits = 0;
    std::size_t n_cols = 0;
    std::vector<cplx> a;  // a[col * dim + row]

    StateBatch() = default;
    StateBatch(std::size_t n, std::size_t cols)
        : n_qubits(n), n_cols(cols), a((std::size_t{1} << n) * cols, cplx{}) {}

    std::size_t dim() const { return std::size_t{1} << n_qubits; }
    cplx* col(std::size_t c) { return a.data() + c * dim(); }
    const cplx* col(std::size_t c) const { return a.data() + c * dim(); }

    static StateBatch identity(std::size_t n);
    static StateBatch from_unitary(const DenseUnitary& u);
    DenseUnitary to_unitary() const;
};

void apply_gate(StateVector& state, const BoundGate& gate);
void apply_circuit(StateVector& state, const BoundCircuit& circuit);

void apply_gate(StateBatch& batch, const BoundGate& gate);
void apply_circuit(StateBatch& batch, const BoundCircuit& circuit);

/// Amplitude at index i moves to index i XOR mask. Involutive.
void apply_flip_mask(StateVector& state, std::uint64_t mask);
void apply_pauli_x_set(StateVector& state, std::span<const std::size_t> qubits);

std::uint64_t flip_mask(std::span<const std::size_t> qubits);

/// <bra|ket> with deterministic pairwise reduction.
cplx overlap(const StateVector& bra, const StateVector& ket);

/// Materializes the circuit as a dense matrix by evolving the identity batch.
/// Refuses circuits above `limit_qubits` with an estimate of the bytes the
/// matrix would need.
DenseUnitary circuit_unitary(const BoundCircuit& circuit,
                             std::size_t limit_qubits = kDenseLimitQubits);

/// Binary dumps, little-endian doubles: states are an 8-byte qubit count then
/// 2^n (re, im) pairs; matrices an 8-byte dimension then row-major pairs.
void write_state(std::ostream& os, const StateVector& state);
StateVector read_state(std::istream& is);
void write_unitary(std::ostream& os, const DenseUnitary& u);
DenseUnitary read_unitary(std::istream& is);

}  // namespace aqc
