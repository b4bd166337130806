#include <doctest.h>

#include <cmath>

#include "aqc/circuit.hpp"
#include "aqc/statevector.hpp"
#include "support/oracles.hpp"

using namespace aqc;
namespace oracle = aqc::testing;

namespace {

double max_diff(const DenseUnitary& u, const Eigen::MatrixXcd& ref) {
    double worst = 0.0;
    for (std::size_t r = 0; r < u.dim; ++r)
        for (std::size_t c = 0; c < u.dim; ++c)
            worst = std::max(worst, std::abs(u.at(r, c) - ref(r, c)));
    return worst;
}

}  // namespace

TEST_SUITE_BEGIN("circuit");

TEST_CASE("cnot block emits the expected gate sequence") {
    auto gates = build_cnot_block(0, 1, 0);
    REQUIRE(gates.size() == 5);
    CHECK(std::get<CnotGate>(gates[0]).control == 0);
    CHECK(std::get<CnotGate>(gates[0]).target == 1);
    auto rot = [&](std::size_t i) { return std::get<RotationGate>(gates[i]); };
    CHECK(rot(1).axis == Axis::Y);
    CHECK(rot(1).qubit == 0);
    CHECK(*rot(1).slot == 0);
    CHECK(rot(2).axis == Axis::Z);
    CHECK(rot(2).qubit == 0);
    CHECK(*rot(2).slot == 1);
    CHECK(rot(3).axis == Axis::Y);
    CHECK(rot(3).qubit == 1);
    CHECK(*rot(3).slot == 2);
    CHECK(rot(4).axis == Axis::X);
    CHECK(rot(4).qubit == 1);
    CHECK(*rot(4).slot == 3);
    CHECK_THROWS_AS(build_cnot_block(2, 2, 0), std::invalid_argument);
}

TEST_CASE("cnot block with zero angles reduces to a plain cnot") {
    ParamCircuit circuit;
    circuit.n_qubits = 2;
    circuit.gates = build_cnot_block(0, 1, 0);
    circuit.n_params = 4;
    std::vector<double> zeros(4, 0.0);
    DenseUnitary u = circuit_unitary(bind_parameters(circuit, zeros));

    BoundCircuit plain;
    plain.n_qubits = 2;
    plain.gates = {CnotGate{0, 1}};
    CHECK(max_diff(u, oracle::dense_circuit_oracle(plain)) < 1e-15);
}

TEST_CASE("stacked blocks match the dense matrix-product oracle") {
    ParamCircuit circuit = build_layered_ansatz(AnsatzSpec{2, 1, 3, {{0, 1}}});
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        auto angles = oracle::random_angles(circuit.n_params, rng);
        BoundCircuit bound = bind_parameters(circuit, angles);
        CHECK(max_diff(circuit_unitary(bound), oracle::dense_circuit_oracle(bound)) < 1e-12);
    }
}

TEST_CASE("layered ansatz parameter counts") {
    ParamCircuit fig = build_layered_ansatz(AnsatzSpec{4, 2, 3, {{0, 1}, {2, 3}, {1, 2}}});
    CHECK(fig.n_params == 84);
    CHECK(fig.cnot_count() == 18);

    ParamCircuit smallest = build_layered_ansatz(AnsatzSpec{2, 1, 1, {{0, 1}}});
    CHECK(smallest.n_params == 10);

    ParamCircuit chain = build_layered_ansatz(AnsatzSpec::brick(24, 1, 1));
    CHECK(chain.cnot_count() == 23);
    CHECK(chain.n_params == 164);
}

TEST_CASE("parameter count follows 3n + 4L for arbitrary specs") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 2 + rng.index(5);
        std::size_t layers = 1 + rng.index(3);
        std::size_t reps = 1 + rng.index(3);
        ParamCircuit circuit = build_layered_ansatz(AnsatzSpec::brick(n, layers, reps));
        CHECK(circuit.n_params == 3 * n + 4 * circuit.cnot_count());
        circuit.validate();
    }
}

TEST_CASE("default brick connectivity") {
    auto pairs = brick_connectivity(4);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(pairs[1] == std::pair<std::size_t, std::size_t>{2, 3});
    CHECK(pairs[2] == std::pair<std::size_t, std::size_t>{1, 2});
    CHECK(brick_connectivity(24).size() == 23);
}

TEST_CASE("binding") {
    ParamCircuit circuit = build_layered_ansatz(AnsatzSpec::brick(3, 1, 1));

    SUBCASE("all-zero angles make every rotation the identity") {
        std::vector<double> zeros(circuit.n_params, 0.0);
        BoundCircuit bound = bind_parameters(circuit, zeros);
        for (const auto& g : bound.gates) {
            if (const auto* rot = std::get_if<BoundRotation>(&g)) {
                Mat2 m = bound_gate_matrix(*rot);
                CHECK(std::abs(m.m00 - 1.0) < 1e-15);
                CHECK(std::abs(m.m11 - 1.0) < 1e-15);
                CHECK(std::abs(m.m01) < 1e-15);
                CHECK(std::abs(m.m10) < 1e-15);
            }
        }
    }

    SUBCASE("rz at pi is diag(-i, i)") {
        Mat2 m = rotation_matrix(Axis::Z, 3.14159265358979323846);
        CHECK(std::abs(m.m00 - cplx(0, -1)) < 1e-15);
        CHECK(std::abs(m.m11 - cplx(0, 1)) < 1e-15);
    }

    SUBCASE("rebinding changes rotations only") {
        Rng rng(3);
        auto angles = oracle::random_angles(circuit.n_params, rng);
        BoundCircuit a = bind_parameters(circuit, angles);
        for (double& x : angles) x += 0.25;
        BoundCircuit b = bind_parameters(circuit, angles);
        REQUIRE(a.gates.size() == b.gates.size());
        std::size_t cnots_a = 0, cnots_b = 0;
        for (std::size_t i = 0; i < a.gates.size(); ++i) {
            cnots_a += std::holds_alternative<CnotGate>(a.gates[i]);
            cnots_b += std::holds_alternative<CnotGate>(b.gates[i]);
        }
        CHECK(cnots_a == cnots_b);
    }

    SUBCASE("length mismatch and non-finite angles are rejected") {
        std::vector<double> short_angles(circuit.n_params - 1, 0.0);
        CHECK_THROWS_AS(bind_parameters(circuit, short_angles), std::invalid_argument);
        std::vector<double> bad(circuit.n_params, 0.0);
        bad[0] = std::nan("");
        CHECK_THROWS_AS(bind_parameters(circuit, bad), std::invalid_argument);
    }
}

TEST_CASE("adjoint circuit") {
    Rng rng(7);

    SUBCASE("involution restores the gate list") {
        BoundCircuit bound = oracle::random_bound_ansatz(3, 2, rng);
        BoundCircuit twice = adjoint_circuit(adjoint_circuit(bound));
        REQUIRE(twice.gates.size() == bound.gates.size());
        for (std::size_t i = 0; i < bound.gates.size(); ++i) {
            if (const auto* rot = std::get_if<BoundRotation>(&bound.gates[i])) {
                const auto& back = std::get<BoundRotation>(twice.gates[i]);
                CHECK(back.axis == rot->axis);
                CHECK(back.qubit == rot->qubit);
                CHECK(back.angle == rot->angle);
            }
        }
    }

    SUBCASE("single rotation negates its angle") {
        BoundCircuit c;
        c.n_qubits = 1;
        c.gates = {BoundRotation{Axis::X, 0, 0.7}};
        BoundCircuit adj = adjoint_circuit(c);
        CHECK(std::get<BoundRotation>(adj.gates[0]).angle == -0.7);
    }

    SUBCASE("composing with the adjoint gives the identity") {
        BoundCircuit bound = oracle::random_bound_ansatz(3, 2, rng);
        BoundCircuit adj = adjoint_circuit(bound);
        for (int trial = 0; trial < 100; ++trial) {
            StateVector state = oracle::random_state(3, rng);
            StateVector original = state;
            apply_circuit(state, bound);
            apply_circuit(state, adj);
            double worst = 0.0;
            for (std::size_t i = 0; i < state.dim(); ++i)
                worst = std::max(worst, std::abs(state.amps[i] - original.amps[i]));
            CHECK(worst < 1e-12);
        }
    }

    SUBCASE("dense product with the adjoint is the identity matrix") {
        BoundCircuit bound = oracle::random_bound_ansatz(3, 2, rng);
        Eigen::MatrixXcd u = oracle::dense_circuit_oracle(bound);
        Eigen::MatrixXcd v = oracle::to_eigen(circuit_unitary(adjoint_circuit(bound)));
        CHECK((v * u - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("bound circuits are unitary") {
    Rng rng(13);
    for (std::size_t n = 2; n <= 6; ++n) {
        BoundCircuit bound = oracle::random_bound_ansatz(n, 1, rng);
        CHECK(circuit_unitary(bound).max_unitarity_residual() < 1e-12);
    }
}

TEST_CASE("spec validation errors") {
    CHECK_THROWS_AS(build_layered_ansatz(AnsatzSpec{4, 1, 1, {}}), std::invalid_argument);
    CHECK_THROWS_AS(build_layered_ansatz(AnsatzSpec{4, 1, 4, {{0, 1}}}), std::invalid_argument);
    CHECK_THROWS_AS(build_layered_ansatz(AnsatzSpec{1, 1, 1, {{0, 1}}}), std::invalid_argument);
    CHECK_THROWS_AS(build_layered_ansatz(AnsatzSpec{4, 0, 1, {{0, 1}}}), std::invalid_argument);
    CHECK_THROWS_AS(build_layered_ansatz(AnsatzSpec{4, 1, 1, {{0, 4}}}), std::invalid_argument);

    ParamCircuit broken;
    broken.n_qubits = 2;
    broken.n_params = 2;
    broken.gates = {RotationGate{Axis::X, 0, 0, 0.0}, RotationGate{Axis::Y, 1, 0, 0.0}};
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("json round trip preserves structure and order") {
    Rng rng(17);
    ParamCircuit circuit = build_layered_ansatz(AnsatzSpec::brick(4, 2, 2));
    // sprinkle in a fixed-angle rotation
    circuit.gates.push_back(RotationGate{Axis::Z, 2, std::nullopt, -1.5707963267948966});

    ParamCircuit back = circuit_from_json(circuit_to_json(circuit));
    REQUIRE(back.gates.size() == circuit.gates.size());
    CHECK(back.n_qubits == circuit.n_qubits);
    CHECK(back.n_params == circuit.n_params);
    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        if (const auto* rot = std::get_if<RotationGate>(&circuit.gates[i])) {
            const auto& b = std::get<RotationGate>(back.gates[i]);
            CHECK(b.axis == rot->axis);
            CHECK(b.qubit == rot->qubit);
            CHECK(b.slot == rot->slot);
            if (!rot->slot) CHECK(b.fixed_angle == rot->fixed_angle);
        } else {
            const auto& cx = std::get<CnotGate>(circuit.gates[i]);
            const auto& b = std::get<CnotGate>(back.gates[i]);
            CHECK(b.control == cx.control);
            CHECK(b.target == cx.target);
        }
    }
    // a second bounce is byte-identical
    CHECK(circuit_to_json(back) == circuit_to_json(circuit));
}

TEST_SUITE_END();
