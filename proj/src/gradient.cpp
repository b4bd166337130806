#include "aqc/gradient.hpp"

#include <cmath>
#include <stdexcept>

#include "aqc/parallel.hpp"

namespace aqc {

namespace {

/// <u| P |w> for a single-qubit Pauli; fused so no temporary state is formed.
cplx pauli_inner(const cplx* u, const cplx* w, std::size_t dim, std::size_t qubit,
                 Axis axis) {
    const std::size_t mask = std::size_t{1} << qubit;
    const std::size_t lo_mask = mask - 1;
    const std::size_t hi_mask = ~lo_mask;
    const std::size_t pairs = dim >> 1;
    const cplx i1(0.0, 1.0);
    switch (axis) {
    case Axis::X:
        return pairwise_sum<cplx>(0, pairs, [&](std::size_t i) {
            std::size_t i0 = ((i & hi_mask) << 1) | (i & lo_mask);
            std::size_t i1x = i0 | mask;
            return std::conj(u[i0]) * w[i1x] + std::conj(u[i1x]) * w[i0];
        });
    case Axis::Y:
        return pairwise_sum<cplx>(0, pairs, [&](std::size_t i) {
            std::size_t i0 = ((i & hi_mask) << 1) | (i & lo_mask);
            std::size_t i1x = i0 | mask;
            return -i1 * std::conj(u[i0]) * w[i1x] + i1 * std::conj(u[i1x]) * w[i0];
        });
    default:
        return pairwise_sum<cplx>(0, pairs, [&](std::size_t i) {
            std::size_t i0 = ((i & hi_mask) << 1) | (i & lo_mask);
            std::size_t i1x = i0 | mask;
            return std::conj(u[i0]) * w[i0] - std::conj(u[i1x]) * w[i1x];
        });
    }
}

}  // namespace

const char* cost_kind_name(CostKind kind) {
    switch (kind) {
    case CostKind::StateGlobal: return "global";
    case CostKind::StateLocal: return "local";
    case CostKind::UnitaryHs: return "unitary-hs";
    case CostKind::UnitaryLocal: return "unitary-local";
    case CostKind::SurrogateComposite: return "surrogate-composite";
    case CostKind::SurrogateMax: return "surrogate-max";
    }
    return "unknown";
}

CostFunction::CostFunction(ParamCircuit ansatz, StateVector target, CostSpec spec)
    : ansatz_(std::move(ansatz)), spec_(std::move(spec)), target_state_(std::move(target)) {
    ansatz_.validate();
    switch (spec_.kind) {
    case CostKind::StateGlobal:
    case CostKind::StateLocal:
    case CostKind::SurrogateComposite:
    case CostKind::SurrogateMax:
        break;
    default:
        throw std::invalid_argument("cost kind does not accept a state target");
    }
    if (target_state_->n_qubits != ansatz_.n_qubits)
        throw std::invalid_argument("target and ansatz qubit counts differ");
    double dev = std::abs(target_state_->norm_sq() - 1.0);
    if (dev > 1e-8) throw std::invalid_argument("target state is not normalized");
    if (spec_.kind == CostKind::StateLocal) spec_.weights.validate(ansatz_.n_qubits);
    if (spec_.kind == CostKind::SurrogateComposite || spec_.kind == CostKind::SurrogateMax) {
        if (!(spec_.alpha >= 0.0 && spec_.alpha <= 1.0))
            throw std::invalid_argument("surrogate alpha must lie in [0, 1]");
    }
    build_terms();
    phi_ = StateVector(ansatz_.n_qubits);
    lam_ = StateVector(ansatz_.n_qubits);
    fwd_u_ = StateVector(ansatz_.n_qubits);
    fwd_w_ = StateVector(ansatz_.n_qubits);
}

CostFunction::CostFunction(ParamCircuit ansatz, DenseUnitary target, CostSpec spec)
    : ansatz_(std::move(ansatz)), spec_(std::move(spec)), target_unitary_(std::move(target)) {
    ansatz_.validate();
    if (spec_.kind != CostKind::UnitaryHs && spec_.kind != CostKind::UnitaryLocal)
        throw std::invalid_argument("cost kind does not accept a unitary target");
    if (target_unitary_->dim != (std::size_t{1} << ansatz_.n_qubits))
        throw std::invalid_argument("target and ansatz dimensions differ");
    if (spec_.kind == CostKind::UnitaryLocal) spec_.weights.validate(ansatz_.n_qubits);
    build_terms();
    bphi_ = StateBatch(ansatz_.n_qubits, target_unitary_->dim);
    blam_ = StateBatch(ansatz_.n_qubits, target_unitary_->dim);
    bfwd_u_ = StateBatch(ansatz_.n_qubits, target_unitary_->dim);
    bfwd_w_ = StateBatch(ansatz_.n_qubits, target_unitary_->dim);
}

void CostFunction::build_terms() {
    base_terms_.clear();
    term_order_.clear();
    base_terms_.push_back({0, 1.0});
    term_order_.push_back(0);
    const FlipWeights& w = spec_.weights;
    if (spec_.kind == CostKind::StateLocal || spec_.kind == CostKind::UnitaryLocal) {
        std::uint64_t total = 0;
        for (std::size_t m = 1; m <= w.k; ++m) {
            total += binomial(ansatz_.n_qubits, m);
            if (total > kFlipTermBudget)
                throw ResourceError("flip-term enumeration would exceed the budget", total);
        }
        for (std::size_t m = 1; m <= w.k; ++m) {
            for_each_flip_subset(ansatz_.n_qubits, m, [&](std::uint64_t mask) {
                base_terms_.push_back({mask, w.alphas[m - 1]});
                term_order_.push_back(m);
            });
        }
    }
    trace_values_.resize(base_terms_.size());
}

void CostFunction::set_weight_scale(double w) {
    if (!std::isfinite(w) || w < 0.0)
        throw std::invalid_argument("weight scale must be finite and non-negative");
    scale_ = w;
}

void CostFunction::back_evolve_state(std::span<const double> angles) {
    BoundCircuit adj = adjoint_circuit(bind_parameters(ansatz_, angles));
    phi_.amps = target_state_->amps;
    apply_circuit(phi_, adj);
}

void CostFunction::back_evolve_batch(std::span<const double> angles) {
    BoundCircuit adj = adjoint_circuit(bind_parameters(ansatz_, angles));
    bphi_ = StateBatch::from_unitary(*target_unitary_);
    apply_circuit(bphi_, adj);
}

void CostFunction::refresh_surrogate(std::span<const double> angles) {
    if (spec_.kind != CostKind::SurrogateComposite && spec_.kind != CostKind::SurrogateMax)
        return;
    back_evolve_state(angles);
    const std::size_t n = ansatz_.n_qubits;
    std::vector<cplx> y(n + 1);
    y[0] = phi_.amps[0];
    for (std::size_t j = 1; j <= n; ++j) y[j] = phi_.amps[std::size_t{1} << (j - 1)];
    double norm_sq = 0.0;
    for (const cplx& c : y) norm_sq += std::norm(c);
    if (norm_sq < 1e-300) {
        surrogate_degenerate_ = true;
        return;
    }
    surrogate_degenerate_ = false;
    if (spec_.kind == CostKind::SurrogateComposite) {
        double inv = 1.0 / std::sqrt(norm_sq);
        surrogate_.betas.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) surrogate_.betas[i] = y[i] * inv;
    } else {
        std::size_t best = 0;
        for (std::size_t i = 1; i < y.size(); ++i)
            if (std::abs(y[i]) > std::abs(y[best])) best = i;
        if (surrogate_.leader < 0 ||
            static_cast<std::size_t>(surrogate_.leader) >= y.size()) {
            surrogate_.leader = static_cast<int>(best);
        } else {
            double incumbent = std::abs(y[static_cast<std::size_t>(surrogate_.leader)]);
            if (incumbent < (1.0 - surrogate_.hysteresis) * std::abs(y[best]))
                surrogate_.leader = static_cast<int>(best);
        }
        surrogate_.betas.assign(y.size(), cplx{});
        surrogate_.betas[static_cast<std::size_t>(surrogate_.leader)] = 1.0;
    }
}

double CostFunction::state_value_from_phi() {
    const std::size_t n = ansatz_.n_qubits;
    const double y0_sq = std::norm(phi_.amps[0]);
    stats_.zero_flip = y0_sq;
    stats_.fidelity = y0_sq;
    stats_.surrogate_degenerate = false;

    switch (spec_.kind) {
    case CostKind::StateGlobal:
        return 1.0 - y0_sq;
    case CostKind::StateLocal: {
        double value = 1.0 - y0_sq;
        for (std::size_t t = 1; t < base_terms_.size(); ++t)
            value -= base_terms_[t].weight * scale_ * std::norm(phi_.amps[base_terms_[t].mask]);
        return value;
    }
    case CostKind::SurrogateComposite: {
        if (surrogate_degenerate_ || surrogate_.betas.size() != n + 1) {
            stats_.surrogate_degenerate = true;
            return 1.0 - y0_sq;
        }
        const double alpha = effective_alpha();
        cplx c = std::conj(surrogate_.betas[0]) * phi_.amps[0];
        for (std::size_t j = 1; j <= n; ++j)
            c += std::conj(surrogate_.betas[j]) * phi_.amps[std::size_t{1} << (j - 1)];
        return 1.0 - (1.0 - alpha) * y0_sq - alpha * std::norm(c);
    }
    case CostKind::SurrogateMax: {
        if (surrogate_degenerate_ || surrogate_.leader < 0) {
            stats_.surrogate_degenerate = true;
            return 1.0 - y0_sq;
        }
        const double alpha = effective_alpha();
        std::uint64_t mask = surrogate_.leader == 0
                                 ? 0
                                 : std::uint64_t{1} << (surrogate_.leader - 1);
        return 1.0 - (1.0 - alpha) * y0_sq - alpha * std::norm(phi_.amps[mask]);
    }
    default:
        throw std::logic_error("state value on unitary kind");
    }
}

double CostFunction::batch_value_from_phi() {
    const std::size_t d = bphi_.dim();
    const double d2 = static_cast<double>(d) * static_cast<double>(d);
    for (std::size_t t = 0; t < base_terms_.size(); ++t) {
        const std::uint64_t mask = base_terms_[t].mask;
        cplx tr{};
        for (std::size_t c = 0; c < d; ++c) tr += bphi_.col(c)[c ^ mask];
        trace_values_[t] = tr;
    }
    const double z = std::norm(trace_values_[0]) / d2;
    stats_.zero_flip = z;
    stats_.fidelity = (1.0 + static_cast<double>(d) * z) / (static_cast<double>(d) + 1.0);
    stats_.surrogate_degenerate = false;

    double value = 1.0 - z;
    for (std::size_t t = 1; t < base_terms_.size(); ++t)
        value -= base_terms_[t].weight * scale_ * std::norm(trace_values_[t]) / d2;
    return value;
}

double CostFunction::value(std::span<const double> angles) {
    if (target_state_) {
        back_evolve_state(angles);
        return state_value_from_phi();
    }
    back_evolve_batch(angles);
    return batch_value_from_phi();
}

void CostFunction::state_lambda() {
    const std::size_t n = ansatz_.n_qubits;
    std::fill(lam_.amps.begin(), lam_.amps.end(), cplx{});
    switch (spec_.kind) {
    case CostKind::StateGlobal:
        lam_.amps[0] = phi_.amps[0];
        break;
    case CostKind::StateLocal:
        lam_.amps[0] = phi_.amps[0];
        for (std::size_t t = 1; t < base_terms_.size(); ++t) {
            std::uint64_t mask = base_terms_[t].mask;
            lam_.amps[mask] += base_terms_[t].weight * scale_ * phi_.amps[mask];
        }
        break;
    case CostKind::SurrogateComposite: {
        if (surrogate_degenerate_ || surrogate_.betas.size() != n + 1) {
            lam_.amps[0] = phi_.amps[0];
            break;
        }
        const double alpha = effective_alpha();
        cplx c = std::conj(surrogate_.betas[0]) * phi_.amps[0];
        for (std::size_t j = 1; j <= n; ++j)
            c += std::conj(surrogate_.betas[j]) * phi_.amps[std::size_t{1} << (j - 1)];
        lam_.amps[0] = (1.0 - alpha) * phi_.amps[0] + alpha * c * surrogate_.betas[0];
        for (std::size_t j = 1; j <= n; ++j)
            lam_.amps[std::size_t{1} << (j - 1)] += alpha * c * surrogate_.betas[j];
        break;
    }
    case CostKind::SurrogateMax: {
        if (surrogate_degenerate_ || surrogate_.leader < 0) {
            lam_.amps[0] = phi_.amps[0];
            break;
        }
        const double alpha = effective_alpha();
        std::uint64_t mask = surrogate_.leader == 0
                                 ? 0
                                 : std::uint64_t{1} << (surrogate_.leader - 1);
        lam_.amps[0] += (1.0 - alpha) * phi_.amps[0];
        lam_.amps[mask] += alpha * phi_.amps[mask];
        break;
    }
    default:
        throw std::logic_error("state lambda on unitary kind");
    }
}

void CostFunction::batch_lambda() {
    const std::size_t d = bphi_.dim();
    const double d2 = static_cast<double>(d) * static_cast<double>(d);
    std::fill(blam_.a.begin(), blam_.a.end(), cplx{});
    for (std::size_t t = 0; t < base_terms_.size(); ++t) {
        double w = (t == 0) ? 1.0 / d2 : base_terms_[t].weight * scale_ / d2;
        const cplx coeff = w * trace_values_[t];
        const std::uint64_t mask = base_terms_[t].mask;
        for (std::size_t c = 0; c < d; ++c) blam_.col(c)[c ^ mask] += coeff;
    }
}

std::vector<double> CostFunction::sweep_state(const BoundCircuit& bound) {
    std::vector<double> grad(ansatz_.n_params, 0.0);
    fwd_u_.amps = lam_.amps;
    fwd_w_.amps = phi_.amps;
    const std::size_t dim = phi_.dim();
    for (std::size_t gi = 0; gi < ansatz_.gates.size(); ++gi) {
        if (const auto* rot = std::get_if<RotationGate>(&ansatz_.gates[gi])) {
            if (rot->slot) {
                cplx ip = pauli_inner(fwd_u_.amps.data(), fwd_w_.amps.data(), dim,
                                      rot->qubit, rot->axis);
                grad[*rot->slot] = ip.imag();
            }
        }
        apply_gate(fwd_u_, bound.gates[gi]);
        apply_gate(fwd_w_, bound.gates[gi]);
    }
    return grad;
}

std::vector<double> CostFunction::sweep_batch(const BoundCircuit& bound) {
    std::vector<double> grad(ansatz_.n_params, 0.0);
    bfwd_u_.a = blam_.a;
    bfwd_w_.a = bphi_.a;
    const std::size_t dim = bphi_.dim();
    for (std::size_t gi = 0; gi < ansatz_.gates.size(); ++gi) {
        if (const auto* rot = std::get_if<RotationGate>(&ansatz_.gates[gi])) {
            if (rot->slot) {
                cplx acc{};
                for (std::size_t c = 0; c < bfwd_u_.n_cols; ++c)
                    acc += pauli_inner(bfwd_u_.col(c), bfwd_w_.col(c), dim, rot->qubit,
                                       rot->axis);
                grad[*rot->slot] = acc.imag();
            }
        }
        apply_gate(bfwd_u_, bound.gates[gi]);
        apply_gate(bfwd_w_, bound.gates[gi]);
    }
    return grad;
}

GradientReport CostFunction::value_and_gradient(std::span<const double> angles) {
    GradientReport report;
    BoundCircuit bound = bind_parameters(ansatz_, angles);
    if (target_state_) {
        phi_.amps = target_state_->amps;
        apply_circuit(phi_, adjoint_circuit(bound));
        report.cost = state_value_from_phi();
        state_lambda();
        report.gradient = sweep_state(bound);
    } else {
        bphi_ = StateBatch::from_unitary(*target_unitary_);
        apply_circuit(bphi_, adjoint_circuit(bound));
        report.cost = batch_value_from_phi();
        batch_lambda();
        report.gradient = sweep_batch(bound);
    }
    for (double g : report.gradient)
        if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient component");
    return report;
}

GradientReport adjoint_gradient(const CostSpec& spec, const ParamCircuit& circuit,
                                std::span<const double> angles, const StateVector& target) {
    CostFunction fn(circuit, target, spec);
    fn.refresh_surrogate(angles);
    return fn.value_and_gradient(angles);
}

GradientReport adjoint_gradient(const CostSpec& spec, const ParamCircuit& circuit,
                                std::span<const double> angles, const DenseUnitary& target) {
    CostFunction fn(circuit, target, spec);
    return fn.value_and_gradient(angles);
}

GradientReport finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> angles, double h) {
    if (!(h > 0)) throw std::invalid_argument("finite-difference step must be positive");
    std::vector<double> x(angles.begin(), angles.end());
    GradientReport report;
    report.cost = f(x);
    report.gradient.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        double saved = x[j];
        x[j] = saved + h;
        double fp = f(x);
        x[j] = saved - h;
        double fm = f(x);
        x[j] = saved;
        report.gradient[j] = (fp - fm) / (2.0 * h);
    }
    return report;
}

GradientReport finite_difference_gradient(CostFunction& fn, std::span<const double> angles,
                                          double h) {
    return finite_difference_gradient(
        [&fn](std::span<const double> x) { return fn.value(x); }, angles, h);
}

}  // namespace aqc
