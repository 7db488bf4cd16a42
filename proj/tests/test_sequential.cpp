#include <doctest.h>

#include <cmath>

#include "seqmc/random.hpp"
#include "seqmc/sampling.hpp"
#include "seqmc/sequential.hpp"
#include "seqmc/weakmeas.hpp"

using namespace seqmc;

namespace {

// least-disturbing solution at guessing target G = fraction * C
MCSolution ld_solution(double p, double theta, double fraction) {
    MCSolution sol = two_state_closed_form(p, theta);
    const double c_conf = sol.outcomes[0].confidence;
    const double s = sol.direction_overlap();
    LeastDisturbingParams ld = least_disturbing_params(c_conf, fraction * c_conf, s);
    return two_state_closed_form(p, theta, ld.c1);
}

// next-party ensemble expressed directly through the plan pieces
ComplexMatrix next_state_formula(const ChannelPlan& plan, const DensityOperator& rho) {
    const int n = static_cast<int>(plan.targets.size());
    ComplexMatrix out(rho.dim());
    for (int y = 0; y < n; ++y) {
        const Cvec& my = plan.directions[static_cast<size_t>(y)].amplitudes();
        double rate = plan.conclusive_weights[static_cast<size_t>(y)] *
                      inner(my, matvec(rho.matrix(), my)).real();
        ComplexMatrix term = plan.targets[static_cast<size_t>(y)].projector();
        term *= Complex(rate, 0.0);
        out += term;
    }
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const Cvec& mk = plan.directions[static_cast<size_t>(k)].amplitudes();
            const Cvec& ml = plan.directions[static_cast<size_t>(l)].amplitudes();
            Complex w = std::sqrt(plan.inconclusive_weights[static_cast<size_t>(k)] *
                                  plan.inconclusive_weights[static_cast<size_t>(l)]) *
                        inner(mk, matvec(rho.matrix(), ml));
            ComplexMatrix term = outer(plan.targets[static_cast<size_t>(k)].amplitudes(),
                                       plan.targets[static_cast<size_t>(l)].amplitudes());
            term *= w;
            out += term;
        }
    return out;
}

}  // namespace

TEST_SUITE("sequential") {

TEST_CASE("two-state channel with least-disturbing targets") {
    const double p = 0.8, theta = M_PI / 3.0;
    MCSolution sol = ld_solution(p, theta, 0.3);
    GramConstruction gram = sequential_gram(sol.directions(), sol.weights());

    // a_1 = a_2 and (a+c)^{-1} = D^2
    const double s = sol.direction_overlap();
    const double d2 = 1.0 - s * s;
    CHECK(gram.inconclusive_weights[0] ==
          doctest::Approx(gram.inconclusive_weights[1]).epsilon(1e-12));
    CHECK(1.0 / (gram.inconclusive_weights[0] + sol.outcomes[0].weight) ==
          doctest::Approx(d2).epsilon(1e-9));

    const double required = (gram.required_gram.at(0, 1) /
                             std::sqrt(gram.inconclusive_weights[0] * gram.inconclusive_weights[1]))
                                .real();
    ChannelPlan plan = build_sequential_channel(sol, symmetric_pair_targets(required));
    CHECK(plan.channel.completeness_defect() < 1e-9);

    // conclusive Kraus operators are exactly sqrt(c) |t><m~|
    for (int x = 0; x < 2; ++x) {
        ComplexMatrix expected = outer(plan.targets[static_cast<size_t>(x)].amplitudes(),
                                       plan.directions[static_cast<size_t>(x)].amplitudes());
        expected *= Complex(std::sqrt(plan.conclusive_weights[static_cast<size_t>(x)]), 0.0);
        CHECK(max_abs_diff(plan.channel.op(x + 1), expected) == 0.0);
    }
}

TEST_CASE("zero conclusive weights give a complete rotation-like channel") {
    const double p = 0.8, theta = M_PI / 3.0;
    MCSolution sol = two_state_closed_form(p, theta, 0.0);
    ChannelPlan plan = build_sequential_channel(sol);
    const double s = sol.direction_overlap();
    CHECK(plan.inconclusive_weights[0] == doctest::Approx(1.0 / (1.0 - s * s)).epsilon(1e-9));
    CHECK(plan.channel.completeness_defect() < 1e-9);
    CHECK(overlap_growth(0.0, 0.0, s).t_factor == doctest::Approx(1.0));
}

TEST_CASE("weights past the construction bound are rejected") {
    const double p = 0.8, theta = M_PI / 3.0;
    MCSolution base = two_state_closed_form(p, theta);
    const double s = base.direction_overlap();
    const double bound = 1.0 / (1.0 - s * s);  // a_x = 0 at c = 1/D^2

    // scan upward until the forced a_x turns negative
    bool rejected = false;
    for (double c = 0.9 * bound; c < 1.2 * bound; c += 0.05 * bound) {
        try {
            MCSolution sol = two_state_closed_form(p, theta, c);
            sequential_gram(sol.directions(), sol.weights());
        } catch (const WeightsTooLarge& e) {
            CHECK(e.offending_weight < 0.0);
            CHECK(c > bound);
            rejected = true;
            break;
        } catch (const InfeasibleWeights&) {
            // POVM feasibility can kick in first, before the channel bound
            break;
        }
    }
    const double cmax_povm = max_equal_weight(base.directions());
    if (bound < cmax_povm) CHECK(rejected);
}

TEST_CASE("overlap growth matches the compiled channel") {
    for (double p : {0.5, 0.8, 0.95})
        for (double theta : {0.7, M_PI / 3.0, 2.1})
            for (double fraction : {0.15, 0.4}) {
                Ensemble ens = two_state_ensemble(p, theta);
                MCSolution sol = ld_solution(p, theta, fraction);
                const double s_in = sol.direction_overlap();
                OverlapGrowth growth =
                    overlap_growth(sol.outcomes[0].weight, sol.outcomes[1].weight, s_in);
                CHECK(growth.t_factor > 1.0);
                CHECK(growth.overlap_out > s_in);

                ChannelPlan plan = build_sequential_channel(sol);
                Ensemble next = propagate_ensemble(plan.channel, ens);
                MaxConfidence m1 = max_confidence_element(next, 1);
                MaxConfidence m2 = max_confidence_element(next, 2);
                CHECK(std::abs(overlap(m1.direction, m2.direction) - growth.overlap_out) < 1e-9);
            }
}

TEST_CASE("least disturbing parameters") {
    SUBCASE("zero target keeps the overlap") {
        LeastDisturbingParams ld = least_disturbing_params(0.8, 0.0, 0.4);
        CHECK(ld.c1 == doctest::Approx(0.0));
        CHECK(ld.next_overlap == doctest::Approx(0.4));
    }

    SUBCASE("ratio identity overlap/s = 1 - G/C = eta0") {
        const double p = 0.8, theta = M_PI / 3.0, fraction = 0.3;
        Ensemble ens = two_state_ensemble(p, theta);
        MCSolution base = two_state_closed_form(p, theta);
        const double c_conf = base.outcomes[0].confidence;
        const double s_in = base.direction_overlap();
        LeastDisturbingParams ld = least_disturbing_params(c_conf, fraction * c_conf, s_in);
        CHECK(s_in / ld.next_overlap == doctest::Approx(1.0 - fraction).epsilon(1e-12));

        MCSolution sol = two_state_closed_form(p, theta, ld.c1);
        GuessingReport report = guessing_probability(ens, sol);
        CHECK(report.eta0 == doctest::Approx(1.0 - fraction).epsilon(1e-10));
    }

    SUBCASE("formula overlap equals the compiled next-party POVM overlap") {
        const double p = 0.8, theta = M_PI / 3.0;
        Ensemble ens = two_state_ensemble(p, theta);
        MCSolution base = two_state_closed_form(p, theta);
        const double c_conf = base.outcomes[0].confidence;
        LeastDisturbingParams ld =
            least_disturbing_params(c_conf, 0.3 * c_conf, base.direction_overlap());

        MCSolution sol = two_state_closed_form(p, theta, ld.c1);
        ChannelPlan plan = build_sequential_channel(sol);
        Ensemble next = propagate_ensemble(plan.channel, ens);
        MCSolution next_sol = solve_mc(next);
        CHECK(std::abs(next_sol.direction_overlap() - ld.next_overlap) < 1e-9);
    }

    SUBCASE("unreachable targets are rejected") {
        CHECK_THROWS_AS(least_disturbing_params(0.8, 0.7, 0.6), TargetUnreachable);
    }
}

TEST_CASE("explicit targets must satisfy the gram equation") {
    MCSolution sol = ld_solution(0.8, M_PI / 3.0, 0.3);
    CHECK_THROWS_AS(
        build_sequential_channel(sol, symmetric_pair_targets(0.0)),  // wrong overlap
        InfeasibleGram);
}

TEST_CASE("eq-17 double-sum formula matches apply_channel") {
    const double p = 0.8, theta = M_PI / 3.0;
    Ensemble ens = two_state_ensemble(p, theta);
    ChannelPlan plan = build_sequential_channel(ld_solution(p, theta, 0.3));
    for (const DensityOperator& rho : ens.states) {
        DensityOperator actual = apply_channel(plan.channel, rho);
        CHECK(max_abs_diff(actual.matrix(), next_state_formula(plan, rho)) < 1e-9);
    }
}

TEST_CASE("runs") {
    const double p = 0.8, theta = M_PI / 3.0;
    Ensemble ens = two_state_ensemble(p, theta);
    SequentialPolicy policy;
    policy.kind = PolicyKind::guessing_target;
    policy.value = 0.15;

    SUBCASE("single party records no channel") {
        SequentialRun run = run_sequential(ens, 1, policy);
        CHECK(run.parties.size() == 1);
        CHECK_FALSE(run.parties[0].channel.has_value());
        CHECK(run.termination == Termination::party_budget);
    }

    SUBCASE("two parties share the closed-form confidence") {
        SequentialRun run = run_sequential(ens, 2, policy);
        REQUIRE(run.parties.size() == 2);
        const double expected = two_state_confidence(p, theta);
        for (const PartyRecord& record : run.parties)
            for (const OutcomeSolution& o : record.solution.outcomes)
                CHECK(std::abs(o.confidence - expected) < 1e-9);
    }

    SUBCASE("equal confidence, recursion, and decomposition over four parties") {
        SequentialRun run = run_sequential(ens, 4, policy);
        REQUIRE(run.parties.size() == 4);
        const double expected = two_state_confidence(p, theta);

        for (size_t j = 0; j < run.parties.size(); ++j) {
            const PartyRecord& record = run.parties[j];
            for (const OutcomeSolution& o : record.solution.outcomes)
                CHECK(std::abs(o.confidence - expected) < 1e-8);

            // eta0^(j) * s~^(j+1) = s~^(j)
            if (j + 1 < run.parties.size())
                CHECK(std::abs(record.eta0 * run.parties[j + 1].overlap - record.overlap) < 1e-8);

            // two-state ensembles decompose over the duals with weight C
            PureState d1 = record.solution.outcomes[1].direction.perp();
            PureState d2 = record.solution.outcomes[0].direction.perp();
            ComplexMatrix rebuilt1 = d1.projector();
            rebuilt1 *= Complex(expected, 0.0);
            ComplexMatrix tail1 = d2.projector();
            tail1 *= Complex(1.0 - expected, 0.0);
            rebuilt1 += tail1;
            CHECK(max_abs_diff(rebuilt1, record.input.states[0].matrix()) < 1e-8);

            // monotone disturbance under positive guessing probability
            if (j > 0) CHECK(record.overlap > run.parties[j - 1].overlap);

            // DPI on the party's own pair
            if (record.channel) {
                DpiReport dpi = check_dpi(record.input.states[0], record.input.states[1],
                                          *record.channel);
                CHECK(dpi.pass);
            }
        }

        // product law over the run, using the last party's would-be output
        double product = 1.0;
        for (size_t j = 0; j + 1 < run.parties.size(); ++j) product *= run.parties[j].eta0;
        CHECK(product == doctest::Approx(run.parties.front().overlap /
                                         run.parties.back().overlap)
                             .epsilon(1e-8));
    }

    SUBCASE("p=1 reproduces sequential unambiguous discrimination") {
        Ensemble pure = two_state_ensemble(1.0, M_PI / 3.0);
        SequentialPolicy eta_policy;
        eta_policy.kind = PolicyKind::inconclusive_rate;
        eta_policy.value = 0.8;
        SequentialRun run = run_sequential(pure, 3, eta_policy);
        REQUIRE(run.parties.size() == 3);
        for (const PartyRecord& record : run.parties)
            for (const OutcomeSolution& o : record.solution.outcomes)
                CHECK(std::abs(o.confidence - 1.0) < 1e-8);
    }

    SUBCASE("monte carlo estimates agree with the analytic confidence") {
        SequentialRun run = run_sequential(ens, 2, policy);
        SampleStats stats = sample_run(ens, run.channels(), 1234, 100000);
        const double expected = two_state_confidence(p, theta);
        for (int j = 1; j <= 2; ++j)
            for (int x = 1; x <= 2; ++x)
                CHECK(std::abs(stats.empirical_confidence(j, x) - expected) <=
                      3.0 * stats.confidence_sigma(j, x));
    }

    SUBCASE("budget past the bound terminates with saturation") {
        SequentialPolicy eta_policy;
        eta_policy.kind = PolicyKind::inconclusive_rate;
        eta_policy.value = 0.55;
        eta_policy.delta = 0.05;
        SequentialRun run = run_sequential(ens, 50, eta_policy);
        CHECK(run.termination == Termination::overlap_saturated);
        CHECK(static_cast<int>(run.parties.size()) < 50);

        const double s1 = 0.8 * std::cos(M_PI / 3.0);
        PartyBound bound = max_parties_two_state(s1, 0.55, 0.05);
        CHECK(static_cast<int>(run.parties.size()) == bound.admissible + 1);
    }
}

TEST_CASE("party bounds") {
    CHECK(std::isinf(max_parties_two_state(0.5, 1.0, 0.05).bound));
    CHECK(max_parties_two_state(0.95, 0.8, 0.05).bound == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(max_parties_two_state(0.95, 0.8, 0.05).admissible == 0);

    SUBCASE("bound floor matches direct iteration") {
        PartyBound b = max_parties_two_state(0.5, 0.8, 0.05);
        CHECK(b.admissible == iterate_parties_two_state(0.5, 0.8, 0.05));

        RngStream rng(404, 0);
        for (int i = 0; i < 50; ++i) {
            double s1 = 0.05 + 0.9 * rng.next_uniform();
            double eta0 = 0.05 + 0.9 * rng.next_uniform();
            double delta = (1.0 - s1) * (0.05 + 0.9 * rng.next_uniform());
            PartyBound pb = max_parties_two_state(s1, eta0, delta);
            CHECK(pb.admissible == iterate_parties_two_state(s1, eta0, delta));
        }
    }

    CHECK_THROWS_AS(max_parties_two_state(0.5, 0.8, 0.6), ParamOutOfRange);
}

TEST_CASE("data processing inequality") {
    RngStream rng(555, 0);

    SUBCASE("unitary channels preserve the distance") {
        ComplexMatrix u = eig_hermitian(random_hermitian(2, rng)).eigenvectors;
        KrausChannel unitary = KrausChannel::from_operators({u});
        DensityOperator r1 = ginibre_density(2, rng);
        DensityOperator r2 = ginibre_density(2, rng);
        DpiReport report = check_dpi(r1, r2, unitary);
        CHECK(report.pass);
        CHECK(std::abs(report.distance_in - report.distance_out) < 1e-10);
    }

    SUBCASE("depolarizing kills the distance") {
        ComplexMatrix x(2), y(2), z(2);
        x.at(0, 1) = 1.0;
        x.at(1, 0) = 1.0;
        y.at(0, 1) = Complex(0.0, -1.0);
        y.at(1, 0) = Complex(0.0, 1.0);
        z.at(0, 0) = 1.0;
        z.at(1, 1) = -1.0;
        std::vector<ComplexMatrix> ops{ComplexMatrix::identity(2), x, y, z};
        for (ComplexMatrix& k : ops) k *= Complex(0.5, 0.0);
        KrausChannel depol = KrausChannel::from_operators(std::move(ops));
        DpiReport report = check_dpi(ginibre_density(2, rng), ginibre_density(2, rng), depol);
        CHECK(report.pass);
        CHECK(report.distance_out < 1e-12);
    }

    SUBCASE("seeded draws never violate the inequality") {
        for (int i = 0; i < 1000; ++i) {
            DensityOperator r1 = ginibre_density(2, rng);
            DensityOperator r2 = ginibre_density(2, rng);
            double pth = 0.3 + 0.65 * rng.next_uniform();
            double th = 0.2 + 2.5 * rng.next_uniform();
            double fr = 0.5 * rng.next_uniform();
            ChannelPlan plan = build_sequential_channel(ld_solution(pth, th, fr));
            CHECK(check_dpi(r1, r2, plan.channel).pass);
        }
    }
}

}  // TEST_SUITE
