#include "aqc/trotter.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace aqc {

namespace {

constexpr double kPi = 3.14159265358979323846;

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

void check_dense_limit(std::size_t sites, std::size_t limit_qubits, const char* what) {
    if (sites > limit_qubits) {
        std::uint64_t d = std::uint64_t{1} << sites;
        std::uint64_t bytes = d * d * sizeof(cplx);
        throw ResourceError(std::string(what) + " over " + std::to_string(sites) +
                                " sites would need " + std::to_string(bytes) + " bytes",
                            bytes);
    }
}

/// Adds coeff * P_l P_{l+1} for P in {X, Y, Z} to the dense Hamiltonian.
void add_bond(Eigen::MatrixXcd& h, std::size_t sites, std::size_t l, double coeff) {
    const std::size_t dim = std::size_t{1} << sites;
    const std::size_t ml = std::size_t{1} << l;
    const std::size_t mr = std::size_t{1} << (l + 1);
    const cplx i1(0.0, 1.0);
    for (std::size_t col = 0; col < dim; ++col) {
        const bool bl = col & ml;
        const bool br = col & mr;
        // X X: flips both bits, entry 1
        h(col ^ ml ^ mr, col) += coeff;
        // Y Y: flips both bits, entry (+-i)(+-i)
        cplx yl = bl ? -i1 : i1;  // <1-b| Y |b> = i for b=0, -i for b=1
        cplx yr = br ? -i1 : i1;
        h(col ^ ml ^ mr, col) += coeff * yl * yr;
        // Z Z: diagonal
        double z = ((bl ? -1.0 : 1.0) * (br ? -1.0 : 1.0));
        h(col, col) += coeff * z;
    }
}

}  // namespace

BoundCircuit two_site_gate(double ax, double ay, double az,
                           std::size_t qa, std::size_t qb, std::size_t n_qubits) {
    if (qa == qb || qa >= n_qubits || qb >= n_qubits)
        throw std::invalid_argument("two-site gate needs two distinct qubits in range");
    const double theta = kPi / 2 - 2 * az;
    const double phi = 2 * ax - kPi / 2;
    const double lambda = kPi / 2 - 2 * ay;

    BoundCircuit c;
    c.n_qubits = n_qubits;
    c.gates = {
        BoundRotation{Axis::Z, qb, -kPi / 2},
        CnotGate{qb, qa},
        BoundRotation{Axis::Y, qb, phi},
        CnotGate{qa, qb},
        BoundRotation{Axis::Z, qa, theta},
        BoundRotation{Axis::Y, qb, lambda},
        CnotGate{qb, qa},
        BoundRotation{Axis::Z, qa, kPi / 2},
    };
    return c;
}

BoundCircuit trotter_step_circuit(const SpinChainSpec& spec, double dt) {
    spec.validate();
    if (!(dt > 0)) throw std::invalid_argument("trotter dt must be positive");
    BoundCircuit step;
    step.n_qubits = spec.sites;
    auto append_bond = [&](std::size_t l) {
        BoundCircuit gate = two_site_gate(dt, dt, dt, l, l + 1, spec.sites);
        step.gates.insert(step.gates.end(), gate.gates.begin(), gate.gates.end());
    };
    for (std::size_t l = 0; l + 1 < spec.sites; l += 2) append_bond(l);
    for (std::size_t l = 1; l + 1 < spec.sites; l += 2) append_bond(l);
    return step;
}

BoundCircuit trotter_circuit(const SpinChainSpec& spec, const TrotterPlan& plan) {
    plan.validate();
    BoundCircuit step = trotter_step_circuit(spec, plan.dt);
    BoundCircuit full;
    full.n_qubits = step.n_qubits;
    full.gates.reserve(step.gates.size() * plan.steps);
    for (std::size_t s = 0; s < plan.steps; ++s)
        full.gates.insert(full.gates.end(), step.gates.begin(), step.gates.end());
    return full;
}

DenseUnitary xxx_hamiltonian(const SpinChainSpec& spec, std::size_t limit_qubits) {
    spec.validate();
    check_dense_limit(spec.sites, limit_qubits, "dense hamiltonian");
    const std::size_t dim = std::size_t{1} << spec.sites;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t l = 0; l + 1 < spec.sites; ++l) add_bond(h, spec.sites, l, -1.0);
    return from_eigen(h);
}

DenseUnitary exact_evolution(const SpinChainSpec& spec, double t, std::size_t limit_qubits) {
    DenseUnitary h = xxx_hamiltonian(spec, limit_qubits);
    Eigen::MatrixXcd hm = to_eigen(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hm);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hamiltonian eigendecomposition failed");
    const auto& evals = solver.eigenvalues();
    const auto& evecs = solver.eigenvectors();
    Eigen::VectorXcd phases(evals.size());
    for (Eigen::Index i = 0; i < evals.size(); ++i)
        phases(i) = std::exp(cplx(0.0, -evals(i) * t));
    Eigen::MatrixXcd u = evecs * phases.asDiagonal() * evecs.adjoint();
    return from_eigen(u);
}

double average_gate_fidelity(const DenseUnitary& u, const DenseUnitary& v) {
    if (u.dim != v.dim)
        throw std::invalid_argument("fidelity requires equal dimensions");
    cplx tr{};
    for (std::size_t r = 0; r < u.dim; ++r)
        for (std::size_t c = 0; c < u.dim; ++c) tr += std::conj(v.at(r, c)) * u.at(r, c);
    const double d = static_cast<double>(u.dim);
    return (1.0 + std::norm(tr) / d) / (d + 1.0);
}

namespace {

/// Phase e^{i phi} minimizing ||e^{i phi} A - B||_F; identity when the trace
/// inner product vanishes.
cplx alignment_phase(const DenseUnitary& a, const DenseUnitary& b) {
    cplx tr{};
    for (std::size_t i = 0; i < a.a.size(); ++i) tr += std::conj(a.a[i]) * b.a[i];
    double mag = std::abs(tr);
    return mag > 0 ? tr / mag : cplx(1.0, 0.0);
}

}  // namespace

double phase_aligned_distance(const DenseUnitary& a, const DenseUnitary& b) {
    if (a.dim != b.dim)
        throw std::invalid_argument("distance requires equal dimensions");
    cplx z = alignment_phase(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) acc += std::norm(z * a.a[i] - b.a[i]);
    return std::sqrt(acc);
}

double phase_aligned_max_error(const DenseUnitary& a, const DenseUnitary& b) {
    if (a.dim != b.dim)
        throw std::invalid_argument("distance requires equal dimensions");
    cplx z = alignment_phase(a, b);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i)
        worst = std::max(worst, std::abs(z * a.a[i] - b.a[i]));
    return worst;
}

DenseUnitary two_site_exponential(double ax, double ay, double az) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
    // Bell-diagonal generator: eigenvalues of ax XX + ay YY + az ZZ
    // on (|00>+-|11>)/sqrt2 and (|01>+-|10>)/sqrt2.
    const cplx i1(0.0, 1.0);
    // XX
    h(3, 0) += ax; h(0, 3) += ax; h(2, 1) += ax; h(1, 2) += ax;
    // YY
    h(3, 0) -= ay; h(0, 3) -= ay; h(2, 1) += ay; h(1, 2) += ay;
    // ZZ
    h(0, 0) += az; h(3, 3) += az; h(1, 1) -= az; h(2, 2) -= az;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    Eigen::VectorXcd phases(4);
    for (Eigen::Index i = 0; i < 4; ++i)
        phases(i) = std::exp(i1 * solver.eigenvalues()(i));
    Eigen::MatrixXcd u = solver.eigenvectors() * phases.asDiagonal() *
                         solver.eigenvectors().adjoint();
    return from_eigen(u);
}

}  // namespace aqc
