#include "support/oracles.hpp"

#include <cmath>

namespace aqc::testing {

namespace {

Eigen::Matrix2cd gate_matrix_2x2(Axis axis, double angle) {
    Mat2 m = rotation_matrix(axis, angle);
    Eigen::Matrix2cd out;
    out << m.m00, m.m01, m.m10, m.m11;
    return out;
}

/// Expands a single-qubit matrix to the full register: little-endian, so the
/// qubit-q factor sits at tensor position q counted from the right.
Eigen::MatrixXcd expand_single(const Eigen::Matrix2cd& g, std::size_t qubit,
                               std::size_t n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    const std::size_t mask = std::size_t{1} << qubit;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t bit = (col & mask) ? 1 : 0;
        for (std::size_t rbit = 0; rbit < 2; ++rbit) {
            std::size_t row = (col & ~mask) | (rbit ? mask : 0);
            out(row, col) = g(rbit, bit);
        }
    }
    return out;
}

Eigen::MatrixXcd expand_cnot(std::size_t control, std::size_t target,
                             std::size_t n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t row = (col & cmask) ? (col ^ tmask) : col;
        out(row, col) = 1.0;
    }
    return out;
}

}  // namespace

Eigen::MatrixXcd dense_circuit_oracle(const BoundCircuit& circuit) {
    const std::size_t dim = std::size_t{1} << circuit.n_qubits;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& gate : circuit.gates) {
        Eigen::MatrixXcd g;
        if (const auto* rot = std::get_if<BoundRotation>(&gate))
            g = expand_single(gate_matrix_2x2(rot->axis, rot->angle), rot->qubit,
                              circuit.n_qubits);
        else {
            const auto& cx = std::get<CnotGate>(gate);
            g = expand_cnot(cx.control, cx.target, circuit.n_qubits);
        }
        u = g * u;
    }
    return u;
}

Eigen::MatrixXcd to_eigen(const DenseUnitary& u) {
    Eigen::MatrixXcd m(u.dim, u.dim);
    for (std::size_t r = 0; r < u.dim; ++r)
        for (std::size_t c = 0; c < u.dim; ++c) m(r, c) = u.at(r, c);
    return m;
}

DenseUnitary from_eigen(const Eigen::MatrixXcd& m) {
    DenseUnitary u(static_cast<std::size_t>(m.rows()));
    for (std::size_t r = 0; r < u.dim; ++r)
        for (std::size_t c = 0; c < u.dim; ++c) u.at(r, c) = m(r, c);
    return u;
}

Eigen::VectorXcd to_eigen(const StateVector& s) {
    Eigen::VectorXcd v(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) v(i) = s.amps[i];
    return v;
}

StateVector state_from_eigen(const Eigen::VectorXcd& v, std::size_t n_qubits) {
    StateVector s(n_qubits);
    for (std::size_t i = 0; i < s.dim(); ++i) s.amps[i] = v(i);
    return s;
}

DenseUnitary haar_unitary(std::size_t dim, Rng& rng) {
    Eigen::MatrixXcd g(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) g(r, c) = cplx(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (std::size_t c = 0; c < dim; ++c) {
        cplx d = r(c, c);
        cplx phase = std::abs(d) > 0 ? d / std::abs(d) : cplx(1, 0);
        q.col(c) *= phase;
    }
    return from_eigen(q);
}

StateVector random_state(std::size_t n_qubits, Rng& rng) {
    StateVector s(n_qubits);
    double norm_sq = 0.0;
    for (auto& a : s.amps) {
        a = cplx(rng.normal(), rng.normal());
        norm_sq += std::norm(a);
    }
    double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& a : s.amps) a *= inv;
    return s;
}

std::vector<double> random_angles(std::size_t count, Rng& rng) {
    std::vector<double> angles(count);
    for (double& a : angles) a = rng.uniform(0.0, 6.283185307179586476925286766559);
    return angles;
}

BoundCircuit random_bound_ansatz(std::size_t n_qubits, std::size_t layers, Rng& rng) {
    ParamCircuit circuit = build_layered_ansatz(AnsatzSpec::brick(n_qubits, layers, 1));
    return bind_parameters(circuit, random_angles(circuit.n_params, rng));
}

std::vector<double> marginal_zero_probabilities(const StateVector& state) {
    std::vector<double> p(state.n_qubits, 0.0);
    for (std::size_t q = 0; q < state.n_qubits; ++q) {
        const std::size_t mask = std::size_t{1} << q;
        double acc = 0.0;
        for (std::size_t i = 0; i < state.dim(); ++i)
            if (!(i & mask)) acc += std::norm(state.amps[i]);
        p[q] = acc;
    }
    return p;
}

}  // namespace aqc::testing
