#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aqc/circuit.hpp"
#include "aqc/statevector.hpp"

namespace aqc {

/// Truncation order k with per-order flip weights alpha_1..alpha_k.
struct FlipWeights {
    std::size_t k = 0;
    std::vector<double> alphas;

    static FlipWeights none() { return {}; }

    /// alpha_m = (n - m) / n for m = 1..k. With k = n-1 this reproduces the
    /// untruncated local cost.
    static FlipWeights uniform_locality(std::size_t n, std::size_t k);

    /// Weights from solve_alpha_system, collapsing the truncated cost to the
    /// uniform product form on the single-rotation ansatz.
    static FlipWeights telescoping(std::size_t n, std::size_t k);

    FlipWeights scaled_by(double w) const {
        FlipWeights out = *this;
        for (double& a : out.alphas) a *= w;
        return out;
    }

    void validate(std::size_t n_qubits) const;
};

/// Solves the k x k linear system that makes the order-k truncated cost
/// telescope; alpha_1 = 1/n for k = 1, (2/n, 2/(n(n-1))) for k = 2.
FlipWeights solve_alpha_system(std::size_t n, std::size_t k);

/// Cost value with unweighted per-order projection sums.
/// terms[0] is the zero-flip term, terms[m] the order-m flip sum, so
/// value = 1 - terms[0] - sum_m alpha_m * terms[m].
struct CostReport {
    double value = 0.0;
    std::vector<double> terms;
    std::vector<std::uint64_t> term_counts;
    FlipWeights weights;

    std::string to_json() const;
};

/// 1 - Re Tr(V^dag U) / d; in [0, 2].
double frobenius_cost(const DenseUnitary& v, const DenseUnitary& u);

/// 1 - |Tr(V^dag U)|^2 / d^2; in [0, 1], invariant under global phase.
double hs_cost(const DenseUnitary& v, const DenseUnitary& u);

/// 1 - |<0| V^dag |target>|^2.
double state_global_cost(const BoundCircuit& v, const StateVector& target);

/// 1 - |<0|V^dag t>|^2 - sum_m alpha_m sum_{|S|=m} |<0| X_S V^dag t>|^2.
/// V^dag|target> is computed once; subsets are enumerated in lexicographic
/// order of their sorted qubit tuples. Evaluations whose subset count would
/// exceed `term_budget` raise ResourceError instead of truncating silently.
CostReport state_local_cost(const BoundCircuit& v, const StateVector& target,
                            const FlipWeights& weights,
                            std::uint64_t term_budget = kFlipTermBudget);

/// Trace version for matrix targets, every term normalized by d^2.
CostReport unitary_local_cost(const DenseUnitary& v, const DenseUnitary& u,
                              const FlipWeights& weights,
                              std::uint64_t term_budget = kFlipTermBudget);

/// Surrogate bookkeeping: betas over the zero-flip state plus the n
/// single-flip states; the leader only changes when the incumbent projection
/// drops more than `hysteresis` below the best.
struct SurrogateState {
    std::vector<cplx> betas;
    int leader = -1;  // -1 until the first evaluation
    double hysteresis = 0.10;
};

struct SurrogateResult {
    double value = 0.0;
    SurrogateState state;
    bool degenerate = false;  // all projections vanished; value fell back to global
};

/// Composite surrogate: beta_j proportional to the projections, normalized;
/// cost 1 - (1-alpha)|y_0|^2 - alpha |sum_j beta_j^* y_j|^2.
SurrogateResult surrogate_composite_cost(const BoundCircuit& v, const StateVector& target,
                                         double alpha, const SurrogateState& prior);

/// Max surrogate: only the leading projection enters the flip term, with
/// hysteresis on leader changes.
SurrogateResult surrogate_max_cost(const BoundCircuit& v, const StateVector& target,
                                   double alpha, const SurrogateState& prior);

/// Lexicographic subset enumeration used by the local costs; exposed for
/// tests. Calls visit(mask) for every subset of size m over n qubits.
void for_each_flip_subset(std::size_t n, std::size_t m,
                          const std::function<void(std::uint64_t)>& visit);

std::uint64_t binomial(std::size_t n, std::size_t m);

}  // namespace aqc
