#include <doctest.h>

#include <cmath>

#include "seqmc/mc_solver.hpp"
#include "seqmc/random.hpp"

using namespace seqmc;

TEST_SUITE("mc_solver") {

TEST_CASE("gu ensembles have confidence 2/n") {
    for (int n : {2, 3, 4, 5, 6}) {
        Ensemble ens = gu_ensemble(n);
        for (int x = 1; x <= n; ++x)
            CHECK(max_confidence_element(ens, x).confidence ==
                  doctest::Approx(2.0 / n).epsilon(1e-10));
    }
}

TEST_CASE("orthogonal pure states are discriminated with certainty") {
    Ensemble ens = two_state_ensemble(1.0, M_PI / 2.0);
    CHECK(max_confidence_element(ens, 1).confidence == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(max_confidence_element(ens, 2).confidence == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("solver, closed form, and brute force agree at p=0.8, theta=pi/3") {
    const double p = 0.8, theta = M_PI / 3.0;
    Ensemble ens = two_state_ensemble(p, theta);
    const double closed = two_state_confidence(p, theta);
    for (int x = 1; x <= 2; ++x) {
        CHECK(std::abs(max_confidence_element(ens, x).confidence - closed) < 1e-6);
        double brute = brute_force_confidence_qubit(ens, x, 400);
        CHECK(std::abs(brute - closed) < 1e-4);
    }
}

TEST_CASE("closed form") {
    SUBCASE("p=1 realizes unambiguous discrimination") {
        MCSolution sol = two_state_closed_form(1.0, 1.1);
        CHECK(sol.outcomes[0].confidence == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sol.outcomes[1].confidence == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("theta=pi/2 gives C=(1+p)/2") {
        for (double p : {0.2, 0.5, 0.9}) {
            CHECK(two_state_confidence(p, M_PI / 2.0) == doctest::Approx((1.0 + p) / 2.0));
            Ensemble ens = two_state_ensemble(p, M_PI / 2.0);
            CHECK(max_confidence_element(ens, 1).confidence ==
                  doctest::Approx((1.0 + p) / 2.0).epsilon(1e-9));
        }
    }

    SUBCASE("slackness holds by construction") {
        for (double p : {0.3, 0.8, 1.0})
            for (double theta : {0.4, M_PI / 2.0, 2.8}) {
                MCSolution sol = two_state_closed_form(p, theta);
                for (const OutcomeSolution& o : sol.outcomes) {
                    ComplexMatrix mx = o.direction.projector();
                    mx *= Complex(o.weight, 0.0);
                    CHECK(std::abs((mx * o.complementary.matrix()).trace().real()) < 1e-12);
                }
            }
    }

    SUBCASE("matches the generic solver across parameters") {
        for (double p : {0.1, 0.5, 0.95})
            for (double theta : {0.3, 1.0, 2.0, 2.9}) {
                Ensemble ens = two_state_ensemble(p, theta);
                MCSolution sol = two_state_closed_form(p, theta);
                for (int x = 1; x <= 2; ++x) {
                    MaxConfidence mc = max_confidence_element(ens, x);
                    CHECK(std::abs(mc.confidence - sol.outcomes[static_cast<size_t>(x - 1)].confidence) < 1e-9);
                    CHECK(overlap(mc.direction, sol.outcomes[static_cast<size_t>(x - 1)].direction) ==
                          doctest::Approx(1.0).epsilon(1e-7));
                }
            }
    }
}

TEST_CASE("certification") {
    SUBCASE("closed-form solutions certify on a 20x20 grid") {
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j) {
                double p = 0.05 + 0.95 * i / 19.0;
                double theta = 0.1 + (M_PI - 0.2) * j / 19.0;
                Ensemble ens = two_state_ensemble(p, theta);
                OptimalityCertificate cert = certify_optimality(ens, two_state_closed_form(p, theta));
                CHECK(cert.pass);
                for (const OutcomeCertificate& o : cert.outcomes) {
                    CHECK(o.min_eigenvalue >= -1e-8);
                    CHECK(o.slackness_residual <= 1e-8);
                    CHECK(o.stability_defect <= 1e-8);
                }
            }
    }

    SUBCASE("a rotated direction breaks slackness") {
        const double p = 0.8, theta = M_PI / 3.0;
        Ensemble ens = two_state_ensemble(p, theta);
        MCSolution sol = two_state_closed_form(p, theta);
        const Cvec& d = sol.outcomes[0].direction.amplitudes();
        const double rot = 0.1;
        Cvec rotated{std::cos(rot) * d[0] - std::sin(rot) * d[1],
                     std::sin(rot) * d[0] + std::cos(rot) * d[1]};
        sol.outcomes[0].direction = PureState::from_amplitudes(rotated, true);
        OptimalityCertificate cert = certify_optimality(ens, sol);
        CHECK_FALSE(cert.pass);
        CHECK(cert.outcomes[0].slackness_residual > 1e-4);
    }

    SUBCASE("p=1 slackness pins a zero eigenvalue along the measured direction") {
        Ensemble ens = two_state_ensemble(1.0, 1.3);
        MCSolution sol = two_state_closed_form(1.0, 1.3);
        ComplexMatrix delta = ens.average().matrix();
        delta *= Complex(sol.outcomes[0].confidence, 0.0);
        ComplexMatrix half = ens.states[0].matrix();
        half *= Complex(0.5, 0.0);
        delta -= half;
        const Cvec& dir = sol.outcomes[0].direction.amplitudes();
        CHECK(std::abs(inner(dir, matvec(delta, dir))) < 1e-12);
    }
}

TEST_CASE("guessing probability") {
    const double p = 0.8, theta = M_PI / 3.0;
    Ensemble ens = two_state_ensemble(p, theta);

    SUBCASE("zero weights mean no conclusive outcomes") {
        MCSolution sol = two_state_closed_form(p, theta, 0.0);
        GuessingReport report = guessing_probability(ens, sol);
        CHECK(report.guessing_probability == doctest::Approx(0.0));
        CHECK(report.eta0 == doctest::Approx(1.0));
    }

    SUBCASE("G = C (1 - eta0) for the equal-confidence pair") {
        MCSolution sol = two_state_closed_form(p, theta);
        GuessingReport report = guessing_probability(ens, sol);
        const double c_conf = sol.outcomes[0].confidence;
        CHECK(report.guessing_probability ==
              doctest::Approx(c_conf * (1.0 - report.eta0)).epsilon(1e-12));
    }

    SUBCASE("direct and constraint-form evaluations agree") {
        MCSolution sol = two_state_closed_form(p, theta);
        GuessingReport report = guessing_probability(ens, sol);
        const double c_conf = sol.outcomes[0].confidence;
        const double s = sol.direction_overlap();
        const double constraint_form = 0.5 * c_conf * (1.0 - s * s) *
                                       (sol.outcomes[0].weight + sol.outcomes[1].weight);
        CHECK(std::abs(report.guessing_probability - constraint_form) < 1e-9);
    }
}

TEST_CASE("brute force oracle") {
    Ensemble orth = two_state_ensemble(1.0, M_PI / 2.0);
    CHECK(brute_force_confidence_qubit(orth, 1, 400) >= 0.9999);

    Ensemble trine = gu_ensemble(3);
    CHECK(std::abs(brute_force_confidence_qubit(trine, 2, 400) - 2.0 / 3.0) < 1e-4);
}

TEST_CASE("povm assembly") {
    const double p = 0.8, theta = M_PI / 3.0;
    MCSolution sol = two_state_closed_form(p, theta);

    SUBCASE("zero weights give M0 = I") {
        Povm povm = assemble_povm(sol, {0.0, 0.0});
        CHECK(max_abs_diff(povm.element(0), ComplexMatrix::identity(2)) < 1e-15);
        CHECK(validate_povm(povm).pass);
    }

    SUBCASE("least-disturbing weights are feasible") {
        Ensemble ens = two_state_ensemble(p, theta);
        const double c_conf = sol.outcomes[0].confidence;
        const double s = sol.direction_overlap();
        const double g_target = 0.3 * c_conf;
        const double c = g_target / (c_conf * (1.0 - s * s));
        Povm povm = assemble_povm(sol, {c, c});
        CHECK(validate_povm(povm).pass);
        MCSolution weighted = solve_mc_with_weights(ens, {c, c});
        CHECK(guessing_probability(ens, weighted).guessing_probability ==
              doctest::Approx(g_target).epsilon(1e-10));
    }

    SUBCASE("weights past the feasibility boundary are rejected") {
        const double cmax = max_equal_weight(sol.directions());
        CHECK_NOTHROW(assemble_povm(sol, {cmax, cmax}));
        CHECK_THROWS_AS(assemble_povm(sol, {cmax + 1e-6, cmax + 1e-6}), InfeasibleWeights);

        // bisection puts the boundary where M0's smallest eigenvalue crosses 0
        ComplexMatrix m0 = ComplexMatrix::identity(2);
        for (const PureState& d : sol.directions()) {
            ComplexMatrix mx = d.projector();
            mx *= Complex(cmax, 0.0);
            m0 -= mx;
        }
        CHECK(std::abs(eig_hermitian(m0).eigenvalues.back()) < 1e-9);
    }
}

TEST_CASE("solver certifies and dominates the oracle on seeded ensembles") {
    RngStream rng(2024, 0);
    int count = 0;
    for (int n : {2, 3, 4}) {
        for (int i = 0; i < 167 && count < 500; ++i, ++count) {
            Ensemble ens = random_qubit_ensemble(n, rng);
            MCSolution sol = solve_mc(ens);
            OptimalityCertificate cert = certify_optimality(ens, sol);
            CHECK(cert.pass);
            CHECK(validate_povm(sol.to_povm()).pass);

            for (int x = 1; x <= n; ++x) {
                const OutcomeSolution& o = sol.outcomes[static_cast<size_t>(x - 1)];
                CHECK(o.confidence >= ens.priors[static_cast<size_t>(x - 1)] - 1e-10);
                CHECK(o.confidence <= 1.0 + 1e-10);
                ComplexMatrix mx = o.direction.projector();
                mx *= Complex(o.weight, 0.0);
                CHECK(std::abs((mx * o.complementary.matrix()).trace().real()) <= 1e-8);

                double brute = brute_force_confidence_qubit(ens, x, 200);
                CHECK(o.confidence >= brute - 1e-6);
                CHECK(o.confidence <= brute + 1e-4);
            }
        }
    }
    CHECK(count >= 500);
}

TEST_CASE("closed-form confidence is monotone in p") {
    for (double theta : {0.5, 1.2, 2.2}) {
        double prev = 0.0;
        for (int i = 1; i <= 40; ++i) {
            double c = two_state_confidence(i / 40.0, theta);
            CHECK(c >= prev - 1e-12);
            prev = c;
        }
    }
}

TEST_CASE("singular average with leaking state is rejected") {
    // rank-one average cannot support a state with weight outside it
    std::vector<DensityOperator> states{DensityOperator::from_pure(PureState::basis(2, 0)),
                                        DensityOperator::from_pure(PureState::basis(2, 1))};
    Ensemble ens = Ensemble::create({1.0, 0.0}, states, "degenerate");
    CHECK_THROWS_AS(max_confidence_element(ens, 2), SingularAverage);
    CHECK(max_confidence_element(ens, 1).confidence == doctest::Approx(1.0));
}

}  // TEST_SUITE
