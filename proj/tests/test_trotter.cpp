#include <doctest.h>

#include <cmath>

#include "aqc/trotter.hpp"
#include "support/oracles.hpp"

using namespace aqc;
namespace oracle = aqc::testing;

TEST_SUITE_BEGIN("trotter");

TEST_CASE("two-site gate") {
    SUBCASE("zero couplings give the identity up to phase") {
        DenseUnitary u = circuit_unitary(two_site_gate(0, 0, 0));
        CHECK(phase_aligned_max_error(u, DenseUnitary::identity(4)) < 1e-12);
    }

    SUBCASE("isotropic point matches the dense exponential") {
        DenseUnitary u = circuit_unitary(two_site_gate(0.2, 0.2, 0.2));
        CHECK(phase_aligned_max_error(u, two_site_exponential(0.2, 0.2, 0.2)) < 1e-10);
    }

    SUBCASE("random couplings match the oracle") {
        Rng rng(3);
        for (int trial = 0; trial < 25; ++trial) {
            double ax = rng.uniform(-1, 1), ay = rng.uniform(-1, 1), az = rng.uniform(-1, 1);
            DenseUnitary u = circuit_unitary(two_site_gate(ax, ay, az));
            CHECK(phase_aligned_max_error(u, two_site_exponential(ax, ay, az)) < 1e-10);
        }
    }

    SUBCASE("placement inside a wider register") {
        DenseUnitary narrow = circuit_unitary(two_site_gate(0.3, -0.1, 0.4));
        BoundCircuit wide = two_site_gate(0.3, -0.1, 0.4, 1, 2, 3);
        StateVector s = StateVector::basis_state(3, 0b010);
        apply_circuit(s, wide);
        // qubit 0 untouched
        for (std::size_t i = 0; i < 8; ++i)
            if (i & 1) CHECK(std::abs(s.amps[i]) < 1e-12);
    }
}

TEST_CASE("hamiltonian assembly") {
    SpinChainSpec chain{4};
    DenseUnitary h = xxx_hamiltonian(chain);

    SUBCASE("hermitian to the bit") {
        for (std::size_t r = 0; r < h.dim; ++r)
            for (std::size_t c = 0; c < h.dim; ++c)
                CHECK(h.at(r, c) == std::conj(h.at(c, r)));
    }

    SUBCASE("commutes with its own evolution") {
        DenseUnitary u = exact_evolution(chain, 0.37);
        Eigen::MatrixXcd hm = oracle::to_eigen(h);
        Eigen::MatrixXcd um = oracle::to_eigen(u);
        CHECK((hm * um - um * hm).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("two-site chain has the expected ground-state energy") {
        // open XXX pair with H = -(XX + YY + ZZ): singlet at +3, triplet at -1
        SpinChainSpec pair{2};
        Eigen::MatrixXcd hm = oracle::to_eigen(xxx_hamiltonian(pair));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hm);
        CHECK(std::abs(solver.eigenvalues().minCoeff() + 1.0) < 1e-12);
        CHECK(std::abs(solver.eigenvalues().maxCoeff() - 3.0) < 1e-12);
    }
}

TEST_CASE("exact evolution") {
    SpinChainSpec chain{3};

    SUBCASE("zero time is the identity") {
        DenseUnitary u = exact_evolution(chain, 0.0);
        CHECK(phase_aligned_max_error(u, DenseUnitary::identity(8)) < 1e-12);
        CHECK(u.max_unitarity_residual() < 1e-10);
    }

    SUBCASE("group property") {
        Eigen::MatrixXcd u1 = oracle::to_eigen(exact_evolution(chain, 0.3));
        Eigen::MatrixXcd u2 = oracle::to_eigen(exact_evolution(chain, 0.45));
        Eigen::MatrixXcd u12 = oracle::to_eigen(exact_evolution(chain, 0.75));
        CHECK((u1 * u2 - u12).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("two sites reduce to the two-site exponential") {
        SpinChainSpec pair{2};
        DenseUnitary via_chain = exact_evolution(pair, 0.3);
        DenseUnitary via_gate = two_site_exponential(0.3, 0.3, 0.3);
        CHECK(phase_aligned_max_error(via_chain, via_gate) < 1e-10);
    }

    SUBCASE("resource guard") {
        CHECK_THROWS_AS(exact_evolution(SpinChainSpec{14}, 0.1, 12), ResourceError);
    }
}

TEST_CASE("trotter step") {
    SUBCASE("a single bond is exact") {
        SpinChainSpec pair{2};
        DenseUnitary step = circuit_unitary(trotter_step_circuit(pair, 0.25));
        DenseUnitary exact = exact_evolution(pair, 0.25);
        CHECK(phase_aligned_max_error(step, exact) < 1e-10);
    }

    SUBCASE("halving dt shrinks the one-step error about fourfold") {
        SpinChainSpec chain{4};
        auto err = [&](double dt) {
            DenseUnitary step = circuit_unitary(trotter_step_circuit(chain, dt));
            return phase_aligned_distance(step, exact_evolution(chain, dt));
        };
        double ratio = err(0.2) / err(0.1);
        CHECK(ratio > 3.6);
        CHECK(ratio < 4.4);
    }

    SUBCASE("repeated steps track the full evolution") {
        SpinChainSpec chain{4};
        DenseUnitary coarse = circuit_unitary(trotter_circuit(chain, TrotterPlan{0.2, 2, 1}));
        DenseUnitary fine = circuit_unitary(trotter_circuit(chain, TrotterPlan{0.1, 4, 1}));
        DenseUnitary exact = exact_evolution(chain, 0.4);
        double fid_coarse = average_gate_fidelity(coarse, exact);
        double fid_fine = average_gate_fidelity(fine, exact);
        CHECK(fid_coarse > 0.9);
        CHECK(fid_fine > fid_coarse);
        CHECK(fid_fine <= 1.0 + 1e-12);
    }

    SUBCASE("odd-length chains keep the second-order error decay") {
        SpinChainSpec chain{5};
        auto err = [&](double dt) {
            DenseUnitary step = circuit_unitary(trotter_step_circuit(chain, dt));
            return phase_aligned_distance(step, exact_evolution(chain, dt));
        };
        double ratio = err(0.1) / err(0.05);
        CHECK(ratio > 3.6);
        CHECK(ratio < 4.4);
    }

    SUBCASE("plan validation") {
        CHECK_THROWS_AS(trotter_step_circuit(SpinChainSpec{1}, 0.1), std::invalid_argument);
        CHECK_THROWS_AS(trotter_step_circuit(SpinChainSpec{4}, 0.0), std::invalid_argument);
        TrotterPlan bad{0.1, 0, 1};
        CHECK_THROWS_AS(trotter_circuit(SpinChainSpec{4}, bad), std::invalid_argument);
        TrotterPlan second_order{0.1, 1, 2};
        CHECK_THROWS_AS(trotter_circuit(SpinChainSpec{4}, second_order), std::invalid_argument);
    }
}

TEST_CASE("average gate fidelity") {
    Rng rng(7);
    DenseUnitary u = oracle::haar_unitary(8, rng);

    SUBCASE("phase copies score one") {
        DenseUnitary v = u;
        for (auto& a : v.a) a *= std::exp(cplx(0, 2.1));
        CHECK(std::abs(average_gate_fidelity(u, v) - 1.0) < 1e-12);
    }

    SUBCASE("trace-orthogonal pairs sit at the floor") {
        DenseUnitary id = DenseUnitary::identity(2);
        DenseUnitary x(2);
        x.at(0, 1) = 1.0;
        x.at(1, 0) = 1.0;
        CHECK(std::abs(average_gate_fidelity(id, x) - 1.0 / 3.0) < 1e-15);
    }

    SUBCASE("bounds hold on random pairs") {
        for (int trial = 0; trial < 100; ++trial) {
            DenseUnitary a = oracle::haar_unitary(4, rng);
            DenseUnitary b = oracle::haar_unitary(4, rng);
            double f = average_gate_fidelity(a, b);
            CHECK(f >= 1.0 / 5.0 - 1e-12);
            CHECK(f <= 1.0 + 1e-12);
        }
    }
}

TEST_SUITE_END();
