#pragma once

#include <cstddef>

#include "aqc/circuit.hpp"
#include "aqc/statevector.hpp"

namespace aqc {

/// Open XXX chain, H = -sum_{l=0}^{L-2} (X_l X_{l+1} + Y_l Y_{l+1} + Z_l Z_{l+1}).
struct SpinChainSpec {
    std::size_t sites = 2;

    void validate() const {
        if (sites < 2) throw std::invalid_argument("spin chain needs at least 2 sites");
    }
};

struct TrotterPlan {
    double dt = 0.1;
    std::size_t steps = 1;
    int order = 1;

    void validate() const {
        if (!(dt > 0)) throw std::invalid_argument("trotter dt must be positive");
        if (steps < 1) throw std::invalid_argument("trotter needs at least one step");
        if (order != 1) throw std::invalid_argument("only first-order splitting is supported");
    }
};

/// Circuit for exp(i (ax XX + ay YY + az ZZ)) on qubits (qa, qb), equal to the
/// exponential up to a global phase. Three CNOTs plus fixed and derived
/// rotations; the derived angles are pi/2 - 2*az on the Rz and
/// 2*ax - pi/2, pi/2 - 2*ay on the two Ry gates.
BoundCircuit two_site_gate(double ax, double ay, double az,
                           std::size_t qa = 0, std::size_t qb = 1,
                           std::size_t n_qubits = 2);

/// One first-order step: two-site gates on even bonds (0,1),(2,3),... then odd
/// bonds (1,2),(3,4),..., each with ax = ay = az = dt so the step approximates
/// exp(-i H dt) to O(dt^2).
BoundCircuit trotter_step_circuit(const SpinChainSpec& spec, double dt);

/// Repeats the step circuit `steps` times.
BoundCircuit trotter_circuit(const SpinChainSpec& spec, const TrotterPlan& plan);

/// Dense Hamiltonian of the chain (Hermitian by construction).
DenseUnitary xxx_hamiltonian(const SpinChainSpec& spec,
                             std::size_t limit_qubits = kDenseLimitQubits);

/// exp(-i H t) via Hermitian eigendecomposition.
DenseUnitary exact_evolution(const SpinChainSpec& spec, double t,
                             std::size_t limit_qubits = kDenseLimitQubits);

/// (1 + |Tr(V^dag U)|^2 / d) / (d + 1); ranges over [1/(d+1), 1].
double average_gate_fidelity(const DenseUnitary& u, const DenseUnitary& v);

/// min over global phase of ||e^{i phi} A - B||_F.
double phase_aligned_distance(const DenseUnitary& a, const DenseUnitary& b);

/// min over global phase of the worst entry difference.
double phase_aligned_max_error(const DenseUnitary& a, const DenseUnitary& b);

/// Dense exponential exp(i (ax XX + ay YY + az ZZ)) on two qubits; oracle for
/// the gate construction.
DenseUnitary two_site_exponential(double ax, double ay, double az);

}  // namespace aqc
