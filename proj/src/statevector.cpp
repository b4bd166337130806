#include "aqc/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "aqc/parallel.hpp"

namespace aqc {

namespace {

constexpr std::size_t kParallelGrain = 1 << 14;

struct RotationSpans {
    std::size_t mask, lo_mask, hi_mask;
};

inline void rotation_span(cplx* amps, const RotationSpans& s, const Mat2& m,
                          std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
        std::size_t i0 = ((i & s.hi_mask) << 1) | (i & s.lo_mask);
        std::size_t i1 = i0 | s.mask;
        cplx a0 = amps[i0];
        cplx a1 = amps[i1];
        amps[i0] = m.m00 * a0 + m.m01 * a1;
        amps[i1] = m.m10 * a0 + m.m11 * a1;
    }
}

/// Applies a 2x2 matrix to the amplitude pairs split by `qubit`.
void rotation_kernel(cplx* amps, std::size_t dim, std::size_t qubit, const Mat2& m) {
    const std::size_t mask = std::size_t{1} << qubit;
    const RotationSpans s{mask, mask - 1, ~(mask - 1)};
    const std::size_t pairs = dim >> 1;
    if (pairs >= 2 * kParallelGrain && thread_count() > 1) {
        parallel_for(pairs, kParallelGrain, [&](std::size_t lo, std::size_t hi) {
            rotation_span(amps, s, m, lo, hi);
        });
    } else {
        rotation_span(amps, s, m, 0, pairs);
    }
}

struct CnotSpans {
    std::size_t cmask, tmask, low_mask, mid_mask, hi_mask;
};

inline void cnot_span(cplx* amps, const CnotSpans& s, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
        std::size_t base = ((i & s.hi_mask) << 2) | ((i & s.mid_mask) << 1) | (i & s.low_mask);
        std::size_t i0 = base | s.cmask;
        std::size_t i1 = i0 | s.tmask;
        std::swap(amps[i0], amps[i1]);
    }
}

/// Swaps the target-bit pair wherever the control bit is set. Iterates over
/// indices with both the control and target bits compressed out.
void cnot_kernel(cplx* amps, std::size_t dim, std::size_t control, std::size_t target) {
    const std::size_t low = std::min(control, target);
    const std::size_t high = std::max(control, target);
    const std::size_t low_mask = (std::size_t{1} << low) - 1;
    const std::size_t mid_mask = ((std::size_t{1} << (high - 1)) - 1) & ~low_mask;
    const CnotSpans s{std::size_t{1} << control, std::size_t{1} << target,
                      low_mask, mid_mask, ~(low_mask | mid_mask)};
    const std::size_t quarter = dim >> 2;
    if (quarter >= 2 * kParallelGrain && thread_count() > 1) {
        parallel_for(quarter, kParallelGrain, [&](std::size_t lo, std::size_t hi) {
            cnot_span(amps, s, lo, hi);
        });
    } else {
        cnot_span(amps, s, 0, quarter);
    }
}

void check_gate_bounds(std::size_t n_qubits, const BoundGate& gate) {
    if (const auto* rot = std::get_if<BoundRotation>(&gate)) {
        if (rot->qubit >= n_qubits) throw std::out_of_range("rotation qubit out of range");
    } else {
        const auto& cx = std::get<CnotGate>(gate);
        if (cx.control >= n_qubits || cx.target >= n_qubits)
            throw std::out_of_range("cnot qubit out of range");
        if (cx.control == cx.target)
            throw std::invalid_argument("cnot control equals target");
    }
}

void apply_gate_raw(cplx* amps, std::size_t dim, const BoundGate& gate) {
    if (const auto* rot = std::get_if<BoundRotation>(&gate)) {
        rotation_kernel(amps, dim, rot->qubit, bound_gate_matrix(*rot));
    } else {
        const auto& cx = std::get<CnotGate>(gate);
        cnot_kernel(amps, dim, cx.control, cx.target);
    }
}

}  // namespace

double StateVector::norm_sq() const {
    const cplx* p = amps.data();
    return pairwise_sum<double>(0, amps.size(),
                                [p](std::size_t i) { return std::norm(p[i]); });
}

double DenseUnitary::max_unitarity_residual() const {
    // max |(U^dag U - I)_{ij}|
    double worst = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            cplx acc{};
            for (std::size_t r = 0; r < dim; ++r)
                acc += std::conj(at(r, i)) * at(r, j);
            if (i == j) acc -= 1.0;
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

StateBatch StateBatch::identity(std::size_t n) {
    StateBatch b(n, std::size_t{1} << n);
    for (std::size_t c = 0; c < b.n_cols; ++c) b.col(c)[c] = 1.0;
    return b;
}

StateBatch StateBatch::from_unitary(const DenseUnitary& u) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < u.dim) ++n;
    if ((std::size_t{1} << n) != u.dim)
        throw std::invalid_argument("unitary dimension must be a power of two");
    StateBatch b(n, u.dim);
    for (std::size_t r = 0; r < u.dim; ++r)
        for (std::size_t c = 0; c < u.dim; ++c) b.col(c)[r] = u.at(r, c);
    return b;
}

DenseUnitary StateBatch::to_unitary() const {
    if (n_cols != dim()) throw std::invalid_argument("batch is not square");
    DenseUnitary u(dim());
    for (std::size_t c = 0; c < n_cols; ++c)
        for (std::size_t r = 0; r < dim(); ++r) u.at(r, c) = col(c)[r];
    return u;
}

void apply_gate(StateVector& state, const BoundGate& gate) {
    check_gate_bounds(state.n_qubits, gate);
    apply_gate_raw(state.amps.data(), state.dim(), gate);
}

void apply_circuit(StateVector& state, const BoundCircuit& circuit) {
    if (circuit.n_qubits != state.n_qubits)
        throw std::invalid_argument("circuit and state qubit counts differ");
    for (const auto& g : circuit.gates) apply_gate(state, g);
}

void apply_gate(StateBatch& batch, const BoundGate& gate) {
    check_gate_bounds(batch.n_qubits, gate);
    const std::size_t d = batch.dim();
    for (std::size_t c = 0; c < batch.n_cols; ++c)
        apply_gate_raw(batch.col(c), d, gate);
}

void apply_circuit(StateBatch& batch, const BoundCircuit& circuit) {
    if (circuit.n_qubits != batch.n_qubits)
        throw std::invalid_argument("circuit and batch qubit counts differ");
    for (const auto& g : circuit.gates) apply_gate(batch, g);
}

std::uint64_t flip_mask(std::span<const std::size_t> qubits) {
    std::uint64_t mask = 0;
    for (std::size_t q : qubits) mask |= std::uint64_t{1} << q;
    return mask;
}

void apply_flip_mask(StateVector& state, std::uint64_t mask) {
    if (mask == 0) return;
    if (mask >= state.dim()) throw std::out_of_range("flip mask exceeds register");
    cplx* amps = state.amps.data();
    const std::size_t dim = state.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        std::size_t j = i ^ mask;
        if (i < j) std::swap(amps[i], amps[j]);
    }
}

void apply_pauli_x_set(StateVector& state, std::span<const std::size_t> qubits) {
    for (std::size_t q : qubits)
        if (q >= state.n_qubits) throw std::out_of_range("flip qubit out of range");
    apply_flip_mask(state, flip_mask(qubits));
}

cplx overlap(const StateVector& bra, const StateVector& ket) {
    if (bra.dim() != ket.dim())
        throw std::invalid_argument("overlap requires equal dimensions");
    const cplx* b = bra.amps.data();
    const cplx* k = ket.amps.data();
    const std::size_t dim = bra.dim();
    // Fixed 1024-wide leaf blocks; the leaves may be filled concurrently but
    // the combining tree depends only on the dimension.
    constexpr std::size_t kBlock = 1024;
    const std::size_t n_blocks = (dim + kBlock - 1) / kBlock;
    std::vector<cplx> partials(n_blocks);
    parallel_for(n_blocks, 8, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t blk = lo; blk < hi; ++blk) {
            cplx acc{};
            const std::size_t end = std::min(dim, (blk + 1) * kBlock);
            for (std::size_t i = blk * kBlock; i < end; ++i)
                acc += std::conj(b[i]) * k[i];
            partials[blk] = acc;
        }
    });
    return pairwise_sum<cplx>(0, n_blocks, [&](std::size_t i) { return partials[i]; }, 1);
}

DenseUnitary circuit_unitary(const BoundCircuit& circuit, std::size_t limit_qubits) {
    if (circuit.n_qubits > limit_qubits) {
        std::uint64_t d = std::uint64_t{1} << circuit.n_qubits;
        std::uint64_t bytes = d * d * sizeof(cplx);
        throw ResourceError("dense unitary over " + std::to_string(circuit.n_qubits) +
                                " qubits would need " + std::to_string(bytes) +
                                " bytes (limit " + std::to_string(limit_qubits) + " qubits)",
                            bytes);
    }
    StateBatch batch = StateBatch::identity(circuit.n_qubits);
    apply_circuit(batch, circuit);
    return batch.to_unitary();
}

namespace {

void write_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
double read_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

}  // namespace

void write_state(std::ostream& os, const StateVector& state) {
    write_u64(os, state.n_qubits);
    for (const cplx& a : state.amps) {
        write_f64(os, a.real());
        write_f64(os, a.imag());
    }
}

StateVector read_state(std::istream& is) {
    std::uint64_t n = read_u64(is);
    if (!is || n > 40) throw std::runtime_error("corrupt state dump header");
    StateVector state(static_cast<std::size_t>(n));
    for (cplx& a : state.amps) {
        double re = read_f64(is);
        double im = read_f64(is);
        a = cplx(re, im);
    }
    if (!is) throw std::runtime_error("truncated state dump");
    return state;
}

void write_unitary(std::ostream& os, const DenseUnitary& u) {
    write_u64(os, u.dim);
    for (const cplx& a : u.a) {
        write_f64(os, a.real());
        write_f64(os, a.imag());
    }
}

DenseUnitary read_unitary(std::istream& is) {
    std::uint64_t d = read_u64(is);
    if (!is || d == 0 || d > (std::uint64_t{1} << 20))
        throw std::runtime_error("corrupt unitary dump header");
    DenseUnitary u(static_cast<std::size_t>(d));
    for (cplx& a : u.a) {
        double re = read_f64(is);
        double im = read_f64(is);
        a = cplx(re, im);
    }
    if (!is) throw std::runtime_error("truncated unitary dump");
    return u;
}

}  // namespace aqc
