#include "aqc/circuit.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace aqc {

Mat2 rotation_matrix(Axis axis, double angle) {
    double c = std::cos(0.5 * angle);
    double s = std::sin(0.5 * angle);
    switch (axis) {
    case Axis::X:
        return {cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)};
    case Axis::Y:
        return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
    default:
        return {cplx(c, -s), cplx(0, 0), cplx(0, 0), cplx(c, s)};
    }
}

Mat2 bound_gate_matrix(const BoundRotation& g) { return rotation_matrix(g.axis, g.angle); }

std::size_t ParamCircuit::cnot_count() const {
    std::size_t count = 0;
    for (const auto& g : gates)
        if (std::holds_alternative<CnotGate>(g)) ++count;
    return count;
}

void ParamCircuit::validate() const {
    std::vector<int> slot_uses(n_params, 0);
    for (const auto& g : gates) {
        if (const auto* rot = std::get_if<RotationGate>(&g)) {
            if (rot->qubit >= n_qubits)
                throw std::invalid_argument("rotation qubit index out of range");
            if (rot->slot) {
                if (*rot->slot >= n_params)
                    throw std::invalid_argument("parameter slot index out of range");
                ++slot_uses[*rot->slot];
            } else if (!std::isfinite(rot->fixed_angle)) {
                throw std::invalid_argument("fixed rotation angle must be finite");
            }
        } else {
            const auto& cx = std::get<CnotGate>(g);
            if (cx.control == cx.target)
                throw std::invalid_argument("cnot control and target must differ");
            if (cx.control >= n_qubits || cx.target >= n_qubits)
                throw std::invalid_argument("cnot qubit index out of range");
        }
    }
    for (std::size_t s = 0; s < n_params; ++s)
        if (slot_uses[s] != 1)
            throw std::invalid_argument("every parameter slot must be referenced exactly once");
}

std::vector<Gate> build_cnot_block(std::size_t control, std::size_t target,
                                   std::size_t slot_base) {
    if (control == target)
        throw std::invalid_argument("cnot block requires distinct control and target");
    std::vector<Gate> gates;
    gates.reserve(5);
    gates.push_back(CnotGate{control, target});
    gates.push_back(RotationGate{Axis::Y, control, slot_base, 0.0});
    gates.push_back(RotationGate{Axis::Z, control, slot_base + 1, 0.0});
    gates.push_back(RotationGate{Axis::Y, target, slot_base + 2, 0.0});
    gates.push_back(RotationGate{Axis::X, target, slot_base + 3, 0.0});
    return gates;
}

std::vector<std::pair<std::size_t, std::size_t>> brick_connectivity(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t q = 0; q + 1 < n; q += 2) pairs.emplace_back(q, q + 1);
    for (std::size_t q = 1; q + 1 < n; q += 2) pairs.emplace_back(q, q + 1);
    return pairs;
}

void AnsatzSpec::validate() const {
    if (n_qubits < 2) throw std::invalid_argument("ansatz requires at least 2 qubits");
    if (layers < 1) throw std::invalid_argument("ansatz requires at least 1 layer");
    if (block_reps < 1 || block_reps > 3)
        throw std::invalid_argument("block repetition must be between 1 and 3");
    if (connectivity.empty())
        throw std::invalid_argument("ansatz connectivity must not be empty");
    for (const auto& [c, t] : connectivity) {
        if (c == t) throw std::invalid_argument("connectivity pair with equal qubits");
        if (c >= n_qubits || t >= n_qubits)
            throw std::invalid_argument("connectivity qubit index out of range");
    }
}

ParamCircuit build_layered_ansatz(const AnsatzSpec& spec) {
    spec.validate();
    ParamCircuit circuit;
    circuit.n_qubits = spec.n_qubits;

    std::size_t slot = 0;
    for (std::size_t q = 0; q < spec.n_qubits; ++q) {
        circuit.gates.push_back(RotationGate{Axis::Z, q, slot++, 0.0});
        circuit.gates.push_back(RotationGate{Axis::Y, q, slot++, 0.0});
        circuit.gates.push_back(RotationGate{Axis::Z, q, slot++, 0.0});
    }
    for (std::size_t layer = 0; layer < spec.layers; ++layer) {
        for (const auto& [c, t] : spec.connectivity) {
            for (std::size_t rep = 0; rep < spec.block_reps; ++rep) {
                auto block = build_cnot_block(c, t, slot);
                circuit.gates.insert(circuit.gates.end(), block.begin(), block.end());
                slot += 4;
            }
        }
    }
    circuit.n_params = slot;
    circuit.validate();
    return circuit;
}

ParamCircuit product_ansatz(std::size_t n) {
    if (n < 1) throw std::invalid_argument("product ansatz requires at least 1 qubit");
    ParamCircuit circuit;
    circuit.n_qubits = n;
    for (std::size_t q = 0; q < n; ++q)
        circuit.gates.push_back(RotationGate{Axis::X, q, q, 0.0});
    circuit.n_params = n;
    return circuit;
}

BoundCircuit bind_parameters(const ParamCircuit& circuit, std::span<const double> angles) {
    if (angles.size() != circuit.n_params)
        throw std::invalid_argument("angle vector length does not match parameter count");
    for (double a : angles)
        if (!std::isfinite(a)) throw std::invalid_argument("angles must be finite");

    BoundCircuit bound;
    bound.n_qubits = circuit.n_qubits;
    bound.gates.reserve(circuit.gates.size());
    for (const auto& g : circuit.gates) {
        if (const auto* rot = std::get_if<RotationGate>(&g)) {
            double angle = rot->slot ? angles[*rot->slot] : rot->fixed_angle;
            bound.gates.push_back(BoundRotation{rot->axis, rot->qubit, angle});
        } else {
            bound.gates.push_back(std::get<CnotGate>(g));
        }
    }
    return bound;
}

BoundCircuit adjoint_circuit(const BoundCircuit& circuit) {
    BoundCircuit adj;
    adj.n_qubits = circuit.n_qubits;
    adj.gates.reserve(circuit.gates.size());
    for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
        if (const auto* rot = std::get_if<BoundRotation>(&*it)) {
            adj.gates.push_back(BoundRotation{rot->axis, rot->qubit, -rot->angle});
        } else {
            adj.gates.push_back(std::get<CnotGate>(*it));
        }
    }
    return adj;
}

namespace {

Axis axis_from_name(const std::string& s) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    throw std::invalid_argument("unknown rotation axis: " + s);
}

}  // namespace

std::string circuit_to_json(const ParamCircuit& circuit) {
    nlohmann::json doc;
    doc["n_qubits"] = circuit.n_qubits;
    doc["n_params"] = circuit.n_params;
    auto& gates = doc["gates"] = nlohmann::json::array();
    for (const auto& g : circuit.gates) {
        nlohmann::json entry;
        if (const auto* rot = std::get_if<RotationGate>(&g)) {
            entry["kind"] = "rotation";
            entry["qubits"] = {rot->qubit};
            entry["axis"] = axis_name(rot->axis);
            if (rot->slot)
                entry["slot"] = *rot->slot;
            else
                entry["angle"] = rot->fixed_angle;
        } else {
            const auto& cx = std::get<CnotGate>(g);
            entry["kind"] = "cnot";
            entry["qubits"] = {cx.control, cx.target};
        }
        gates.push_back(std::move(entry));
    }
    return doc.dump(2);
}

ParamCircuit circuit_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    ParamCircuit circuit;
    circuit.n_qubits = doc.at("n_qubits").get<std::size_t>();
    circuit.n_params = doc.at("n_params").get<std::size_t>();
    for (const auto& entry : doc.at("gates")) {
        std::string kind = entry.at("kind").get<std::string>();
        if (kind == "rotation") {
            RotationGate rot;
            rot.axis = axis_from_name(entry.at("axis").get<std::string>());
            rot.qubit = entry.at("qubits").at(0).get<std::size_t>();
            if (entry.contains("slot"))
                rot.slot = entry.at("slot").get<std::size_t>();
            else
                rot.fixed_angle = entry.at("angle").get<double>();
            circuit.gates.push_back(rot);
        } else if (kind == "cnot") {
            CnotGate cx;
            cx.control = entry.at("qubits").at(0).get<std::size_t>();
            cx.target = entry.at("qubits").at(1).get<std::size_t>();
            circuit.gates.push_back(cx);
        } else {
            throw std::invalid_argument("unknown gate kind: " + kind);
        }
    }
    circuit.validate();
    return circuit;
}

}  // namespace aqc
