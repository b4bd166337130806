#pragma once

// Independent reference implementations used only by tests. Everything here
// goes through Eigen dense algebra (Kronecker expansion of explicit gate
// matrices) so it shares no code path with the engine kernels it checks.

#include <Eigen/Dense>
#include <vector>

#include "aqc/circuit.hpp"
#include "aqc/rng.hpp"
#include "aqc/statevector.hpp"

namespace aqc::testing {

/// Dense matrix of a bound circuit by multiplying Kronecker-expanded gates.
Eigen::MatrixXcd dense_circuit_oracle(const BoundCircuit& circuit);

Eigen::MatrixXcd to_eigen(const DenseUnitary& u);
DenseUnitary from_eigen(const Eigen::MatrixXcd& m);
Eigen::VectorXcd to_eigen(const StateVector& s);
StateVector state_from_eigen(const Eigen::VectorXcd& v, std::size_t n_qubits);

/// Haar-distributed unitary: complex Ginibre QR with phase-normalized R.
DenseUnitary haar_unitary(std::size_t dim, Rng& rng);

StateVector random_state(std::size_t n_qubits, Rng& rng);
std::vector<double> random_angles(std::size_t count, Rng& rng);

/// Layered brick ansatz bound at random angles.
BoundCircuit random_bound_ansatz(std::size_t n_qubits, std::size_t layers, Rng& rng);

/// P(qubit j reads 0) for every j, straight from probability sums.
std::vector<double> marginal_zero_probabilities(const StateVector& state);

}  // namespace aqc::testing
