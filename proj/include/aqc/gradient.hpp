#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aqc/circuit.hpp"
#include "aqc/cost.hpp"
#include "aqc/statevector.hpp"

namespace aqc {

enum class CostKind {
    StateGlobal,
    StateLocal,  // flip weights supplied explicitly; covers full and truncated
    UnitaryHs,
    UnitaryLocal,
    SurrogateComposite,
    SurrogateMax,
};

const char* cost_kind_name(CostKind kind);

struct CostSpec {
    CostKind kind = CostKind::StateGlobal;
    FlipWeights weights;  // StateLocal / UnitaryLocal base weights
    double alpha = 1.0;   // surrogate mixing when no schedule drives it
};

struct GradientReport {
    std::vector<double> gradient;
    double cost = 0.0;
};

/// Side quantities produced by every evaluation.
struct EvalStats {
    double zero_flip = 0.0;  // |<0|V^dag t>|^2, or |Tr(V^dag U)|^2 / d^2
    double fidelity = 0.0;   // state fidelity, or average gate fidelity
    bool surrogate_degenerate = false;
};

/// Evaluates one cost and its exact gradient against a fixed target, reusing
/// internal workspaces across calls. The back-evolved state (or matrix) is
/// computed once per evaluation; the gradient is a single reverse sweep, so
/// the work per call is a small constant number of circuit applications
/// regardless of how many flip terms the cost carries.
///
/// Surrogate kinds hold their beta coefficients and leader fixed between
/// refresh_surrogate() calls; value() and value_and_gradient() always
/// differentiate the frozen objective.
class CostFunction {
public:
    CostFunction(ParamCircuit ansatz, StateVector target, CostSpec spec);
    CostFunction(ParamCircuit ansatz, DenseUnitary target, CostSpec spec);

    std::size_t n_params() const { return ansatz_.n_params; }
    std::size_t n_qubits() const { return ansatz_.n_qubits; }
    const ParamCircuit& ansatz() const { return ansatz_; }
    const CostSpec& spec() const { return spec_; }
    bool state_problem() const { return target_state_.has_value(); }

    /// Schedule hook: rescales the flip weights (local kinds) or the surrogate
    /// mixing alpha.
    void set_weight_scale(double w);
    double weight_scale() const { return scale_; }

    /// Surrogate mixing actually in force: the static alpha times the
    /// schedule scale.
    double effective_alpha() const { return spec_.alpha * scale_; }

    /// Recomputes surrogate projections at `angles`. No-op for plain kinds.
    void refresh_surrogate(std::span<const double> angles);
    const SurrogateState& surrogate() const { return surrogate_; }
    void set_surrogate(SurrogateState s) { surrogate_ = std::move(s); }

    double value(std::span<const double> angles);
    GradientReport value_and_gradient(std::span<const double> angles);

    const EvalStats& last_stats() const { return stats_; }

private:
    struct FlipTerm {
        std::uint64_t mask;
        double weight;
    };

    void build_terms();
    void back_evolve_state(std::span<const double> angles);
    void back_evolve_batch(std::span<const double> angles);
    double state_value_from_phi();
    double batch_value_from_phi();
    void state_lambda();
    void batch_lambda();
    std::vector<double> sweep_state(const BoundCircuit& bound);
    std::vector<double> sweep_batch(const BoundCircuit& bound);

    ParamCircuit ansatz_;
    CostSpec spec_;
    std::optional<StateVector> target_state_;
    std::optional<DenseUnitary> target_unitary_;
    double scale_ = 1.0;
    SurrogateState surrogate_;
    bool surrogate_degenerate_ = false;
    EvalStats stats_;

    std::vector<FlipTerm> base_terms_;  // unscaled; order-m terms carry alpha_m
    std::vector<std::uint64_t> term_order_;

    // workspaces
    StateVector phi_, lam_, fwd_u_, fwd_w_;
    StateBatch bphi_, blam_, bfwd_u_, bfwd_w_;
    std::vector<cplx> trace_values_;
};

/// Exact gradient via the reverse sweep. Surrogate kinds refresh their state
/// at `angles` first, then differentiate the frozen objective.
GradientReport adjoint_gradient(const CostSpec& spec, const ParamCircuit& circuit,
                                std::span<const double> angles, const StateVector& target);
GradientReport adjoint_gradient(const CostSpec& spec, const ParamCircuit& circuit,
                                std::span<const double> angles, const DenseUnitary& target);

/// Central differences (C(x + h e_j) - C(x - h e_j)) / 2h on the frozen
/// objective; the verification oracle for adjoint_gradient.
GradientReport finite_difference_gradient(CostFunction& fn, std::span<const double> angles,
                                          double h);

/// Same stencil over an arbitrary scalar function.
GradientReport finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> angles, double h);

}  // namespace aqc
