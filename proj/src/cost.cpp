#include "aqc/cost.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace aqc {

namespace {

constexpr double kNormTolerance = 1e-8;
constexpr double kDegenerateNormSq = 1e-300;

void check_normalized(const StateVector& target) {
    double dev = std::abs(target.norm_sq() - 1.0);
    if (dev > kNormTolerance)
        throw std::invalid_argument("target state is not normalized (|norm^2 - 1| = " +
                                    std::to_string(dev) + ")");
}

/// V^dag |target>.
StateVector back_evolved(const BoundCircuit& v, const StateVector& target) {
    if (v.n_qubits != target.n_qubits)
        throw std::invalid_argument("circuit and target qubit counts differ");
    StateVector phi = target;
    apply_circuit(phi, adjoint_circuit(v));
    return phi;
}

void check_term_budget(std::size_t n, std::size_t k, std::uint64_t budget) {
    std::uint64_t total = 0;
    for (std::size_t m = 1; m <= k; ++m) {
        total += binomial(n, m);
        if (total > budget)
            throw ResourceError("flip-term enumeration would exceed the budget of " +
                                    std::to_string(budget) + " subsets",
                                total);
    }
}

Eigen::MatrixXcd adjoint_product(const DenseUnitary& v, const DenseUnitary& u) {
    if (v.dim != u.dim)
        throw std::invalid_argument("cost requires equal matrix dimensions");
    Eigen::MatrixXcd vm(v.dim, v.dim), um(u.dim, u.dim);
    for (std::size_t r = 0; r < v.dim; ++r) {
        for (std::size_t c = 0; c < v.dim; ++c) {
            vm(r, c) = v.at(r, c);
            um(r, c) = u.at(r, c);
        }
    }
    return vm.adjoint() * um;
}

}  // namespace

std::uint64_t binomial(std::size_t n, std::size_t m) {
    if (m > n) return 0;
    m = std::min(m, n - m);
    std::uint64_t result = 1;
    for (std::size_t i = 1; i <= m; ++i) {
        // n choose m stays well under 2^63 for the register sizes we allow
        result = result * (n - m + i) / i;
    }
    return result;
}

void for_each_flip_subset(std::size_t n, std::size_t m,
                          const std::function<void(std::uint64_t)>& visit) {
    if (m == 0) {
        visit(0);
        return;
    }
    if (m > n) return;
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        std::uint64_t mask = 0;
        for (std::size_t q : idx) mask |= std::uint64_t{1} << q;
        visit(mask);
        // advance to the next combination in lexicographic order
        std::size_t i = m;
        while (i > 0 && idx[i - 1] == n - m + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
}

FlipWeights FlipWeights::uniform_locality(std::size_t n, std::size_t k) {
    if (n < 1 || k > n - 1)
        throw std::invalid_argument("truncation order must satisfy k <= n - 1");
    FlipWeights w;
    w.k = k;
    w.alphas.resize(k);
    for (std::size_t m = 1; m <= k; ++m)
        w.alphas[m - 1] = static_cast<double>(n - m) / static_cast<double>(n);
    return w;
}

FlipWeights FlipWeights::telescoping(std::size_t n, std::size_t k) {
    return solve_alpha_system(n, k);
}

void FlipWeights::validate(std::size_t n_qubits) const {
    if (alphas.size() != k)
        throw std::invalid_argument("flip weights must provide exactly k coefficients");
    if (n_qubits == 0 || k > n_qubits - 1)
        throw std::invalid_argument("truncation order must satisfy k <= n - 1");
    for (double a : alphas)
        if (!std::isfinite(a)) throw std::invalid_argument("flip weights must be finite");
}

FlipWeights solve_alpha_system(std::size_t n, std::size_t k) {
    if (k < 1 || k > n - 1)
        throw std::invalid_argument("alpha system needs 1 <= k <= n - 1");

    // Row t demands that the order-t product coefficient vanish (t >= 1) or
    // normalize to one (t = 0) after substituting sin^2 = 1 - cos^2.
    std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
    std::vector<double> b(k, 0.0);
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t m = std::max<std::size_t>(t, 1); m <= k; ++m) {
            double sign = ((m - t) % 2 == 0) ? 1.0 : -1.0;
            a[t][m - 1] = sign * static_cast<double>(binomial(n - t, m - t));
        }
        b[t] = (t == 0) ? -1.0 : 0.0;
    }

    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) == 0.0)
            throw std::runtime_error("alpha system is singular");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < k; ++r) {
            double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < k; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    FlipWeights w;
    w.k = k;
    w.alphas.resize(k);
    for (std::size_t row = k; row-- > 0;) {
        double acc = b[row];
        for (std::size_t c = row + 1; c < k; ++c) acc -= a[row][c] * w.alphas[c];
        w.alphas[row] = acc / a[row][row];
    }
    return w;
}

std::string CostReport::to_json() const {
    nlohmann::json doc;
    doc["value"] = value;
    doc["terms"] = terms;
    doc["weights"] = {{"k", weights.k}, {"alphas", weights.alphas}};
    return doc.dump();
}

double frobenius_cost(const DenseUnitary& v, const DenseUnitary& u) {
    if (v.dim != u.dim)
        throw std::invalid_argument("cost requires equal matrix dimensions");
    cplx tr{};
    for (std::size_t i = 0; i < v.a.size(); ++i) tr += std::conj(v.a[i]) * u.a[i];
    return 1.0 - tr.real() / static_cast<double>(v.dim);
}

double hs_cost(const DenseUnitary& v, const DenseUnitary& u) {
    if (v.dim != u.dim)
        throw std::invalid_argument("cost requires equal matrix dimensions");
    cplx tr{};
    for (std::size_t i = 0; i < v.a.size(); ++i) tr += std::conj(v.a[i]) * u.a[i];
    double d = static_cast<double>(v.dim);
    return 1.0 - std::norm(tr) / (d * d);
}

double state_global_cost(const BoundCircuit& v, const StateVector& target) {
    check_normalized(target);
    StateVector phi = back_evolved(v, target);
    return 1.0 - std::norm(phi.amps[0]);
}

CostReport state_local_cost(const BoundCircuit& v, const StateVector& target,
                            const FlipWeights& weights, std::uint64_t term_budget) {
    check_normalized(target);
    weights.validate(v.n_qubits);
    check_term_budget(v.n_qubits, weights.k, term_budget);

    StateVector phi = back_evolved(v, target);
    CostReport report;
    report.weights = weights;
    report.terms.resize(weights.k + 1, 0.0);
    report.term_counts.resize(weights.k + 1, 0);
    report.terms[0] = std::norm(phi.amps[0]);
    report.term_counts[0] = 1;

    double value = 1.0 - report.terms[0];
    for (std::size_t m = 1; m <= weights.k; ++m) {
        double sum = 0.0;
        std::uint64_t count = 0;
        for_each_flip_subset(v.n_qubits, m, [&](std::uint64_t mask) {
            sum += std::norm(phi.amps[mask]);
            ++count;
        });
        report.terms[m] = sum;
        report.term_counts[m] = count;
        value -= weights.alphas[m - 1] * sum;
    }
    report.value = value;
    return report;
}

CostReport unitary_local_cost(const DenseUnitary& v, const DenseUnitary& u,
                              const FlipWeights& weights, std::uint64_t term_budget) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < v.dim) ++n;
    if ((std::size_t{1} << n) != v.dim)
        throw std::invalid_argument("matrix dimension must be a power of two");
    weights.validate(n);
    check_term_budget(n, weights.k, term_budget);

    Eigen::MatrixXcd m = adjoint_product(v, u);
    const double d2 = static_cast<double>(v.dim) * static_cast<double>(v.dim);

    auto flip_trace = [&](std::uint64_t mask) {
        cplx tr{};
        for (std::size_t col = 0; col < v.dim; ++col)
            tr += m(static_cast<Eigen::Index>(col ^ mask), static_cast<Eigen::Index>(col));
        return tr;
    };

    CostReport report;
    report.weights = weights;
    report.terms.resize(weights.k + 1, 0.0);
    report.term_counts.resize(weights.k + 1, 0);
    report.terms[0] = std::norm(flip_trace(0)) / d2;
    report.term_counts[0] = 1;

    double value = 1.0 - report.terms[0];
    for (std::size_t order = 1; order <= weights.k; ++order) {
        double sum = 0.0;
        std::uint64_t count = 0;
        for_each_flip_subset(n, order, [&](std::uint64_t mask) {
            sum += std::norm(flip_trace(mask)) / d2;
            ++count;
        });
        report.terms[order] = sum;
        report.term_counts[order] = count;
        value -= weights.alphas[order - 1] * sum;
    }
    report.value = value;
    return report;
}

namespace {

/// Zero-flip plus single-flip projections of V^dag |target>.
std::vector<cplx> surrogate_projections(const StateVector& phi) {
    std::vector<cplx> y(phi.n_qubits + 1);
    y[0] = phi.amps[0];
    for (std::size_t j = 1; j <= phi.n_qubits; ++j)
        y[j] = phi.amps[std::size_t{1} << (j - 1)];
    return y;
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("surrogate mixing alpha must lie in [0, 1]");
}

}  // namespace

SurrogateResult surrogate_composite_cost(const BoundCircuit& v, const StateVector& target,
                                         double alpha, const SurrogateState& prior) {
    check_alpha(alpha);
    check_normalized(target);
    StateVector phi = back_evolved(v, target);
    std::vector<cplx> y = surrogate_projections(phi);

    double norm_sq = 0.0;
    for (const cplx& c : y) norm_sq += std::norm(c);

    SurrogateResult result;
    result.state = prior;
    if (norm_sq < kDegenerateNormSq) {
        result.degenerate = true;
        result.value = 1.0 - std::norm(y[0]);
        return result;
    }
    double inv = 1.0 / std::sqrt(norm_sq);
    result.state.betas.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) result.state.betas[i] = y[i] * inv;
    // With beta proportional to y, the composite projection is exactly |y|.
    result.value = 1.0 - (1.0 - alpha) * std::norm(y[0]) - alpha * norm_sq;
    return result;
}

SurrogateResult surrogate_max_cost(const BoundCircuit& v, const StateVector& target,
                                   double alpha, const SurrogateState& prior) {
    check_alpha(alpha);
    check_normalized(target);
    StateVector phi = back_evolved(v, target);
    std::vector<cplx> y = surrogate_projections(phi);

    double norm_sq = 0.0;
    for (const cplx& c : y) norm_sq += std::norm(c);

    SurrogateResult result;
    result.state = prior;
    if (norm_sq < kDegenerateNormSq) {
        result.degenerate = true;
        result.value = 1.0 - std::norm(y[0]);
        return result;
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (std::abs(y[i]) > std::abs(y[best])) best = i;

    int leader = prior.leader;
    if (leader < 0 || static_cast<std::size_t>(leader) >= y.size()) {
        leader = static_cast<int>(best);
    } else {
        double incumbent = std::abs(y[static_cast<std::size_t>(leader)]);
        if (incumbent < (1.0 - prior.hysteresis) * std::abs(y[best]))
            leader = static_cast<int>(best);
    }
    result.state.leader = leader;
    result.state.betas.assign(y.size(), cplx{});
    result.state.betas[static_cast<std::size_t>(leader)] = 1.0;
    result.value = 1.0 - (1.0 - alpha) * std::norm(y[0]) -
                   alpha * std::norm(y[static_cast<std::size_t>(leader)]);
    return result;
}

}  // namespace aqc
