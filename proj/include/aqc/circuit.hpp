#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aqc/common.hpp"

namespace aqc {

/// Single-qubit rotation. The angle comes either from a parameter slot or is
/// fixed at construction time.
struct RotationGate {
    Axis axis = Axis::Z;
    std::size_t qubit = 0;
    std::optional<std::size_t> slot;  // parameter slot when set
    double fixed_angle = 0.0;         // used when slot is empty

    bool parametrized() const { return slot.has_value(); }
};

struct CnotGate {
    std::size_t control = 0;
    std::size_t target = 0;
};

using Gate = std::variant<RotationGate, CnotGate>;

/// Parametric circuit over n qubits. Gates are stored in application order.
/// Every slot index in [0, n_params) is referenced by exactly one gate.
struct ParamCircuit {
    std::size_t n_qubits = 0;
    std::vector<Gate> gates;
    std::size_t n_params = 0;

    std::size_t cnot_count() const;

    /// Checks the structural invariants (index ranges, slot coverage, finite
    /// fixed angles) and throws std::invalid_argument on violation.
    void validate() const;
};

/// Rotation with a concrete angle; what the state-vector engine consumes.
struct BoundRotation {
    Axis axis = Axis::Z;
    std::size_t qubit = 0;
    double angle = 0.0;
};

using BoundGate = std::variant<BoundRotation, CnotGate>;

struct BoundCircuit {
    std::size_t n_qubits = 0;
    std::vector<BoundGate> gates;
};

/// Entangling block: CNOT(control, target) followed by Ry, Rz on the control
/// and Ry, Rx on the target, consuming four consecutive parameter slots
/// starting at slot_base.
std::vector<Gate> build_cnot_block(std::size_t control, std::size_t target,
                                   std::size_t slot_base);

/// Brick pattern over n qubits: pairs (0,1),(2,3),... then (1,2),(3,4),...,
/// n-1 pairs in total, control below target.
std::vector<std::pair<std::size_t, std::size_t>> brick_connectivity(std::size_t n);

struct AnsatzSpec {
    std::size_t n_qubits = 0;
    std::size_t layers = 1;      // l
    std::size_t block_reps = 1;  // b, 1..3
    std::vector<std::pair<std::size_t, std::size_t>> connectivity;

    static AnsatzSpec brick(std::size_t n, std::size_t layers, std::size_t block_reps) {
        return AnsatzSpec{n, layers, block_reps, brick_connectivity(n)};
    }

    void validate() const;
};

/// Layered ansatz: an Rz-Ry-Rz sweep on every qubit (3n slots, qubit-major),
/// then `layers` layers in which each connectivity pair receives `block_reps`
/// consecutive CNOT blocks. n_params = 3n + 4 * layers * block_reps * |connectivity|.
ParamCircuit build_layered_ansatz(const AnsatzSpec& spec);

/// One Rx per qubit, slots 0..n-1, no entanglers.
ParamCircuit product_ansatz(std::size_t n);

/// Resolves every slot against `angles` (length must equal n_params).
BoundCircuit bind_parameters(const ParamCircuit& circuit, std::span<const double> angles);

/// Reversed gate order with negated rotation angles; CNOTs unchanged.
BoundCircuit adjoint_circuit(const BoundCircuit& circuit);

Mat2 bound_gate_matrix(const BoundRotation& g);

/// JSON round-trip. The document is {n_qubits, n_params, gates:[...]} with
/// each gate {kind, qubits, axis?, slot?|angle?}; order is preserved exactly.
std::string circuit_to_json(const ParamCircuit& circuit);
ParamCircuit circuit_from_json(const std::string& text);

}  // namespace aqc
