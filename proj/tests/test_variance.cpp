#include <doctest.h>

#include <cmath>

#include "aqc/parallel.hpp"
#include "aqc/variance.hpp"
#include "support/oracles.hpp"

using namespace aqc;
namespace oracle = aqc::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Exact Var[dC/dtheta_0] over uniform angles. The integrand is a
/// trigonometric polynomial of degree two per angle, so averaging over the
/// four-point grid {0, pi/2, pi, 3pi/2} per dimension integrates it exactly.
double quadrature_variance(const CostSpec& spec, std::size_t n) {
    ParamCircuit circuit = product_ansatz(n);
    CostFunction fn(circuit, StateVector::zero_state(n), spec);
    std::vector<double> angles(n, 0.0);
    std::size_t points = 1;
    for (std::size_t i = 0; i < n; ++i) points *= 4;

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t grid = 0; grid < points; ++grid) {
        std::size_t g = grid;
        for (std::size_t j = 0; j < n; ++j) {
            angles[j] = 0.5 * kPi * static_cast<double>(g % 4);
            g /= 4;
        }
        double d = fn.value_and_gradient(angles).gradient[0];
        sum += d;
        sum_sq += d * d;
    }
    double m = static_cast<double>(points);
    return sum_sq / m - (sum / m) * (sum / m);
}

CostSpec truncated_spec(std::size_t n, std::size_t k) {
    CostSpec spec;
    spec.kind = CostKind::StateLocal;
    spec.weights = FlipWeights::telescoping(n, k);
    return spec;
}

}  // namespace

TEST_SUITE_BEGIN("variance");

TEST_CASE("product ansatz structure") {
    ParamCircuit one = product_ansatz(1);
    CHECK(one.n_params == 1);
    StateVector s = StateVector::zero_state(1);
    apply_circuit(s, bind_parameters(one, std::vector<double>{0.0}));
    CHECK(std::abs(s.amps[0] - 1.0) < 1e-15);

    ParamCircuit three = product_ansatz(3);
    CHECK(three.n_params == 3);
    CHECK(three.cnot_count() == 0);
}

TEST_CASE("quadrature oracle confirms the closed-form variance laws") {
    CostSpec global;
    global.kind = CostKind::StateGlobal;
    for (std::size_t n = 2; n <= 5; ++n) {
        double expect = 0.125 * std::pow(0.375, static_cast<double>(n - 1));
        CHECK(std::abs(quadrature_variance(global, n) - expect) < 1e-13);
    }

    for (std::size_t n = 2; n <= 5; ++n) {
        CostSpec full;
        full.kind = CostKind::StateLocal;
        full.weights = FlipWeights::uniform_locality(n, n - 1);
        double expect = 1.0 / (8.0 * static_cast<double>(n * n));
        CHECK(std::abs(quadrature_variance(full, n) - expect) < 1e-13);
    }
}

TEST_CASE("quadrature oracle pins the truncated-cost variances") {
    // First order at alpha = 1/n: the flip terms shift the dominant exponent
    // up by one, with a size-dependent prefactor.
    for (std::size_t n = 3; n <= 6; ++n) {
        double nn = static_cast<double>(n);
        double expect = (nn - 1.0) * (2.0 * nn - 1.0) / (3.0 * nn * nn) * 0.125 *
                        std::pow(0.375, static_cast<double>(n - 2));
        CHECK(std::abs(quadrature_variance(truncated_spec(n, 1), n) - expect) < 1e-13);
    }
    // Second order: another exponent shift, again with a polynomial prefactor.
    double v2 = quadrature_variance(truncated_spec(4, 2), 4);
    double v1 = quadrature_variance(truncated_spec(4, 1), 4);
    CHECK(v2 > v1);
}

TEST_CASE("monte-carlo estimates agree with quadrature inside error bars") {
    VarianceScan scan;
    scan.qubit_counts = {5};
    scan.samples = 20000;
    scan.seed = 99;
    scan.cost = VarianceScan::Cost::Truncated;
    scan.truncation = 1;

    auto points = estimate_gradient_variance(scan);
    REQUIRE(points.size() == 1);
    double exact = quadrature_variance(truncated_spec(5, 1), 5);
    CHECK(std::abs(points[0].variance - exact) < 4.0 * points[0].variance_stderr);
    CHECK(std::abs(points[0].mean) < 4.0 * points[0].mean_stderr);
}

TEST_CASE("fixed seeds reproduce the table exactly") {
    VarianceScan scan;
    scan.qubit_counts = {2, 3};
    scan.samples = 2000;
    scan.seed = 5;
    auto a = estimate_gradient_variance(scan);
    auto b = estimate_gradient_variance(scan);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].variance == b[i].variance);
        CHECK(a[i].variance_stderr == b[i].variance_stderr);
        CHECK(a[i].mean == b[i].mean);
    }
}

TEST_CASE("worker count does not change the table") {
    VarianceScan scan;
    scan.qubit_counts = {4};
    scan.samples = 4000;
    scan.seed = 17;
    set_thread_count(1);
    auto a = estimate_gradient_variance(scan);
    set_thread_count(4);
    auto b = estimate_gradient_variance(scan);
    set_thread_count(1);
    CHECK(a[0].variance == b[0].variance);
    CHECK(a[0].variance_stderr == b[0].variance_stderr);
}

TEST_CASE("log fit recovers synthetic exponential laws") {
    std::vector<VariancePoint> points;
    for (std::size_t n = 2; n <= 8; ++n) {
        VariancePoint p;
        p.n = n;
        p.variance = 0.125 * std::pow(0.375, static_cast<double>(n - 1));
        points.push_back(p);
    }
    LogFit fit = fit_log_variance(points);
    CHECK(std::abs(fit.slope - std::log(0.375)) < 1e-12);
    CHECK(std::abs(fit.intercept - (std::log(0.125) - std::log(0.375))) < 1e-12);
}

TEST_CASE("scan validation") {
    VarianceScan scan;
    scan.qubit_counts = {};
    CHECK_THROWS_AS(scan.validate(), std::invalid_argument);
    scan.qubit_counts = {3};
    scan.cost = VarianceScan::Cost::Truncated;
    scan.truncation = 3;
    CHECK_THROWS_AS(scan.validate(), std::invalid_argument);
    scan.truncation = 2;
    scan.component = 3;
    CHECK_THROWS_AS(scan.validate(), std::invalid_argument);
}

TEST_SUITE_END();
