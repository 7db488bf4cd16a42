#include "seqmc/sequential.hpp"

#include <cmath>
#include <limits>

#include "seqmc/weakmeas.hpp"

namespace seqmc {

namespace {

ComplexMatrix direction_gram_of(const std::vector<PureState>& dirs) {
    const int n = static_cast<int>(dirs.size());
    ComplexMatrix g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.at(i, j) = inner(dirs[static_cast<size_t>(i)], dirs[static_cast<size_t>(j)]);
    return g;
}

double overlap_metric(const ComplexMatrix& gram) {
    double m = 0.0;
    for (int i = 0; i < gram.dim(); ++i)
        for (int j = i + 1; j < gram.dim(); ++j) m = std::max(m, std::abs(gram.at(i, j)));
    return m;
}

// Component of `v` orthogonal to every vector in `others`, unit norm.
Cvec orthogonal_complement(const Cvec& v, const std::vector<Cvec>& others) {
    std::vector<Cvec> basis;
    for (const Cvec& o : others) {
        Cvec b = o;
        for (const Cvec& e : basis) {
            Complex coeff = inner(e, b);
            for (size_t i = 0; i < b.size(); ++i) b[i] -= coeff * e[i];
        }
        double len = norm(b);
        if (len > 1e-12) {
            for (Complex& x : b) x /= len;
            basis.push_back(std::move(b));
        }
    }
    Cvec r = v;
    // two Gram-Schmidt passes keep the residual orthogonal to working precision
    for (int pass = 0; pass < 2; ++pass)
        for (const Cvec& e : basis) {
            Complex coeff = inner(e, r);
            for (size_t i = 0; i < r.size(); ++i) r[i] -= coeff * e[i];
        }
    double len = norm(r);
    if (len < 1e-10)
        throw InfeasibleGram("POVM directions are linearly dependent; no dual family exists");
    for (Complex& x : r) x /= len;
    return r;
}

}  // namespace

GramConstruction sequential_gram(const std::vector<PureState>& directions,
                                 const std::vector<double>& weights) {
    const int n = static_cast<int>(directions.size());
    if (n < 2) throw ParamOutOfRange("sequential channel needs at least two outcomes");
    if (weights.size() != directions.size())
        throw DimensionMismatch("weight count must match direction count");
    const int d = directions.front().dim();
    if (n != d)
        throw InfeasibleGram("channel construction needs as many independent directions as dimensions");

    std::vector<Cvec> raw;
    raw.reserve(directions.size());
    for (const PureState& m : directions) raw.push_back(m.amplitudes());
    if (numerical_rank(raw) != n)
        throw InfeasibleGram("POVM directions are linearly dependent");

    GramConstruction out{{}, std::vector<double>(directions.size()), ComplexMatrix(n)};
    std::vector<Complex> denom(directions.size());
    for (int x = 0; x < n; ++x) {
        std::vector<Cvec> others;
        for (int y = 0; y < n; ++y)
            if (y != x) others.push_back(raw[static_cast<size_t>(y)]);
        Cvec dual = orthogonal_complement(raw[static_cast<size_t>(x)], others);
        denom[static_cast<size_t>(x)] = inner(dual, raw[static_cast<size_t>(x)]);  // <phi_x|m~_x>
        const double w2 = std::norm(denom[static_cast<size_t>(x)]);
        double a = 1.0 / w2 - weights[static_cast<size_t>(x)];
        if (a < -tol::structural)
            throw WeightsTooLarge("conclusive weight " + std::to_string(weights[static_cast<size_t>(x)]) +
                                      " for outcome " + std::to_string(x + 1) +
                                      " forces a negative inconclusive weight",
                                  a);
        out.inconclusive_weights[static_cast<size_t>(x)] = std::max(a, 0.0);
        out.duals.push_back(PureState::from_amplitudes(std::move(dual)));
    }

    for (int x = 0; x < n; ++x) {
        out.required_gram.at(x, x) = out.inconclusive_weights[static_cast<size_t>(x)];
        for (int y = 0; y < n; ++y) {
            if (y == x) continue;
            const Complex num = inner(out.duals[static_cast<size_t>(x)], out.duals[static_cast<size_t>(y)]);
            out.required_gram.at(x, y) =
                num / (denom[static_cast<size_t>(x)] * std::conj(denom[static_cast<size_t>(y)]));
        }
    }
    return out;
}

std::vector<PureState> symmetric_pair_targets(double signed_overlap) {
    if (!(signed_overlap > -1.0 && signed_overlap < 1.0))
        throw TargetUnreachable("target overlap must lie in (-1,1)");
    const double hi = std::sqrt((1.0 + signed_overlap) / 2.0);
    const double lo = std::sqrt((1.0 - signed_overlap) / 2.0);
    return {PureState::from_amplitudes({Complex(hi, 0.0), Complex(lo, 0.0)}, true),
            PureState::from_amplitudes({Complex(hi, 0.0), Complex(-lo, 0.0)}, true)};
}

ChannelPlan build_sequential_channel(const MCSolution& sol,
                                     std::optional<std::vector<PureState>> targets,
                                     std::optional<std::vector<double>> inconclusive) {
    const std::vector<PureState> directions = sol.directions();
    const std::vector<double> weights = sol.weights();
    const int n = static_cast<int>(directions.size());
    const int d = sol.dim();

    GramConstruction gram = sequential_gram(directions, weights);

    if (inconclusive) {
        if (inconclusive->size() != static_cast<size_t>(n))
            throw DimensionMismatch("inconclusive weight count mismatch");
        for (int x = 0; x < n; ++x) {
            const double forced = gram.inconclusive_weights[static_cast<size_t>(x)];
            if (std::abs((*inconclusive)[static_cast<size_t>(x)] - forced) > tol::structural * std::max(1.0, forced))
                throw WeightsTooLarge("explicit a_" + std::to_string(x + 1) +
                                          " is inconsistent with completeness",
                                      (*inconclusive)[static_cast<size_t>(x)] - forced);
        }
    }
    const std::vector<double>& a = gram.inconclusive_weights;

    std::vector<PureState> final_targets;
    if (targets) {
        if (targets->size() != static_cast<size_t>(n))
            throw DimensionMismatch("target count must match outcome count");
        for (const PureState& t : *targets)
            if (t.dim() != d) throw DimensionMismatch("target dimension mismatch");
        // consistency: sqrt(a_x a_y) <t_x|t_y> must reproduce the forced Gram
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                if (y == x) continue;
                const Complex lhs = std::sqrt(a[static_cast<size_t>(x)] * a[static_cast<size_t>(y)]) *
                                    inner((*targets)[static_cast<size_t>(x)], (*targets)[static_cast<size_t>(y)]);
                if (std::abs(lhs - gram.required_gram.at(x, y)) > 1e-8)
                    throw InfeasibleGram("explicit targets violate the completeness Gram equation");
            }
        final_targets = std::move(*targets);
    } else {
        HermitianSpectrum gs = eig_hermitian(gram.required_gram);
        if (gs.eigenvalues.back() < -tol::decision)
            throw InfeasibleGram("required target Gram is not PSD", gs.eigenvalues.back());
        WeightedVectors factored = ensemble_from_gram(gram.required_gram);
        // only a global phase is free: rotating targets individually would
        // break the off-diagonal Gram entries K0 depends on
        Complex rot(1.0, 0.0);
        for (const Complex& c : factored.vectors.front()) {
            if (std::abs(c) > 1e-12) {
                rot = std::conj(c) / std::abs(c);
                break;
            }
        }
        for (int x = 0; x < n; ++x) {
            Cvec padded(static_cast<size_t>(d), Complex(0.0, 0.0));
            const Cvec& v = factored.vectors[static_cast<size_t>(x)];
            for (size_t i = 0; i < v.size() && i < padded.size(); ++i) padded[i] = rot * v[i];
            final_targets.push_back(PureState::from_amplitudes(std::move(padded), true, false));
        }
    }

    std::vector<ComplexMatrix> ops;
    ComplexMatrix k0(d);
    for (int x = 0; x < n; ++x) {
        ComplexMatrix kx = outer(final_targets[static_cast<size_t>(x)].amplitudes(),
                                 directions[static_cast<size_t>(x)].amplitudes());
        ComplexMatrix k0_term = kx;
        k0_term *= Complex(std::sqrt(a[static_cast<size_t>(x)]), 0.0);
        k0 += k0_term;
        kx *= Complex(std::sqrt(weights[static_cast<size_t>(x)]), 0.0);
        ops.push_back(std::move(kx));
    }
    ops.insert(ops.begin(), std::move(k0));

    KrausChannel channel = KrausChannel::from_operators(std::move(ops));
    if (channel.completeness_defect() > tol::structural)
        throw IncompleteChannel("compiled channel misses completeness by " +
                                std::to_string(channel.completeness_defect()));
    return ChannelPlan{weights, a, directions, std::move(final_targets), std::move(channel)};
}

OverlapGrowth overlap_growth(double c1, double c2, double overlap_in) {
    if (!(overlap_in >= 0.0 && overlap_in < 1.0))
        throw ParamOutOfRange("overlap must lie in [0,1)");
    if (!(c1 >= 0.0 && c2 >= 0.0)) throw ParamOutOfRange("weights must be >= 0");
    const double d2 = 1.0 - overlap_in * overlap_in;
    if (c1 * d2 >= 1.0 || c2 * d2 >= 1.0)
        throw DivergentT("c D^2 >= 1; the growth factor diverges");
    const double t = 1.0 / std::sqrt((1.0 - c1 * d2) * (1.0 - c2 * d2));
    return OverlapGrowth{t, t * overlap_in};
}

LeastDisturbingParams least_disturbing_params(double confidence, double guessing_target,
                                              double overlap) {
    if (!(confidence > 0.0 && confidence <= 1.0))
        throw ParamOutOfRange("confidence must lie in (0,1]");
    if (!(guessing_target >= 0.0 && guessing_target < confidence))
        throw ParamOutOfRange("guessing target must lie in [0, C)");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw ParamOutOfRange("overlap must lie in [0,1)");

    const double c = guessing_target / (confidence * (1.0 - overlap * overlap));
    const double s = overlap / (1.0 - guessing_target / confidence);
    if (overlap > 0.0 && s >= 1.0)
        throw TargetUnreachable("next-party overlap would reach 1; lower the guessing target");
    if (c * (1.0 + overlap) > 1.0 + 1e-12)
        throw TargetUnreachable("weights exceed the M0 feasibility bound");
    return LeastDisturbingParams{c, c, s};
}

std::string termination_name(Termination t) {
    switch (t) {
        case Termination::party_budget: return "party_budget";
        case Termination::confidence_threshold: return "confidence_threshold";
        case Termination::overlap_saturated: return "overlap_saturated";
        case Termination::construction_failure: return "construction_failure";
    }
    return "unknown";
}

std::vector<KrausChannel> SequentialRun::channels() const {
    std::vector<KrausChannel> out;
    for (const PartyRecord& p : parties) {
        if (p.channel)
            out.push_back(*p.channel);
        else
            out.push_back(measurement_channel(p.solution.to_povm()));
    }
    return out;
}

namespace {

// Equal weight realizing the policy on this ensemble: the G target uses
// G = c sum_x C_x <m~_x|rho|m~_x>, the eta0 target uses
// eta0 = 1 - c sum_x <m~_x|rho|m~_x>.
double policy_weight(const SequentialPolicy& policy, const Ensemble& ens,
                     const std::vector<MaxConfidence>& raw) {
    if (policy.kind == PolicyKind::fixed_weight) {
        if (!(policy.value >= 0.0)) throw ParamOutOfRange("fixed weight must be >= 0");
        return policy.value;
    }
    const ComplexMatrix rho = ens.average().matrix();
    double plain_rate = 0.0;     // sum_x <m~_x|rho|m~_x>
    double weighted_rate = 0.0;  // sum_x C_x <m~_x|rho|m~_x>
    for (const MaxConfidence& mc : raw) {
        const double r = inner(mc.direction.amplitudes(), matvec(rho, mc.direction.amplitudes())).real();
        plain_rate += r;
        weighted_rate += mc.confidence * r;
    }
    if (policy.kind == PolicyKind::guessing_target) {
        if (!(policy.value >= 0.0)) throw ParamOutOfRange("guessing target must be >= 0");
        return policy.value / weighted_rate;
    }
    if (!(policy.value >= 0.0 && policy.value <= 1.0))
        throw ParamOutOfRange("eta0 target must lie in [0,1]");
    return (1.0 - policy.value) / plain_rate;
}

double weak_strength(const SequentialPolicy& policy, const GuessingReport& base) {
    double eps = 0.0;
    switch (policy.kind) {
        case PolicyKind::fixed_weight: eps = policy.value; break;
        case PolicyKind::guessing_target:
            if (base.guessing_probability <= 0.0)
                throw ParamOutOfRange("base measurement has zero guessing probability");
            eps = policy.value / base.guessing_probability;
            break;
        case PolicyKind::inconclusive_rate:
            if (base.eta0 >= 1.0) throw ParamOutOfRange("base measurement is trivial");
            eps = (1.0 - policy.value) / (1.0 - base.eta0);
            break;
    }
    if (!(eps >= 0.0 && eps <= 1.0))
        throw ParamOutOfRange("policy requires a weak-measurement strength outside [0,1]");
    return eps;
}

}  // namespace

SequentialRun run_sequential(const Ensemble& ens, int parties, const SequentialPolicy& policy) {
    if (parties < 1) throw ParamOutOfRange("party budget must be >= 1");
    if (!(policy.delta > 0.0 && policy.delta < 1.0))
        throw ParamOutOfRange("delta must lie in (0,1)");

    SequentialRun run{{}, Termination::party_budget, ""};
    Ensemble current = ens;

    for (int j = 1; j <= parties; ++j) {
        std::vector<MaxConfidence> raw;
        std::vector<Cvec> raw_dirs;
        double cmax = 0.0;
        try {
            for (int x = 1; x <= current.size(); ++x) {
                raw.push_back(max_confidence_element(current, x));
                raw_dirs.push_back(raw.back().direction.amplitudes());
                cmax = std::max(cmax, raw.back().confidence);
            }
        } catch (const Error& e) {
            run.termination = Termination::construction_failure;
            run.note = e.what();
            return run;
        }

        if (policy.min_confidence > 0.0 && cmax <= policy.min_confidence) {
            run.termination = Termination::confidence_threshold;
            run.note = "confidence " + std::to_string(cmax) + " at party " + std::to_string(j);
            return run;
        }

        const bool independent = current.size() == current.dim() &&
                                 numerical_rank(raw_dirs) == current.size();

        PartyRecord record{j, current, MCSolution{{}, ComplexMatrix(current.dim())},
                           0.0, 0.0, ComplexMatrix(current.size()), 0.0,
                           std::nullopt, std::nullopt};
        try {
            if (independent) {
                const double c = policy_weight(policy, current, raw);
                record.solution = solve_mc_with_weights(current, std::vector<double>(
                                                                     static_cast<size_t>(current.size()), c));
            } else {
                MCSolution base = solve_mc(current);
                const double eps = weak_strength(policy, guessing_probability(current, base));
                std::vector<double> scaled = base.weights();
                for (double& w : scaled) w *= eps;
                record.solution = solve_mc_with_weights(current, scaled);
            }
        } catch (const Error& e) {
            run.termination = Termination::construction_failure;
            run.note = e.what();
            return run;
        }

        record.direction_gram = direction_gram_of(record.solution.directions());
        record.overlap = overlap_metric(record.direction_gram);
        if (record.overlap >= 1.0 - policy.delta) {
            run.termination = Termination::overlap_saturated;
            run.note = "direction overlap " + std::to_string(record.overlap) + " at party " +
                       std::to_string(j);
            return run;
        }

        const GuessingReport gr = guessing_probability(current, record.solution);
        record.eta0 = gr.eta0;
        record.guessing = gr.guessing_probability;

        if (j < parties) {
            // channel to the next party; the last party only measures
            try {
                if (independent) {
                    const GramConstruction gram =
                        sequential_gram(record.solution.directions(), record.solution.weights());
                    std::optional<std::vector<PureState>> targets;
                    if (current.size() == 2) {
                        const double aprod =
                            gram.inconclusive_weights[0] * gram.inconclusive_weights[1];
                        if (aprod > 0.0) {
                            const Complex required = gram.required_gram.at(0, 1) / std::sqrt(aprod);
                            if (std::abs(required.imag()) < 1e-10 && std::abs(required.real()) < 1.0)
                                targets = symmetric_pair_targets(required.real());
                        }
                    }
                    ChannelPlan plan = build_sequential_channel(record.solution, std::move(targets));
                    record.channel = plan.channel;
                    record.plan = std::move(plan);
                } else {
                    // record.solution already carries the eps-scaled weights,
                    // so its POVM *is* the weakened measurement
                    record.channel = measurement_channel(record.solution.to_povm());
                }
            } catch (const Error& e) {
                run.parties.push_back(std::move(record));
                run.termination = Termination::construction_failure;
                run.note = e.what();
                return run;
            }
        }

        if (j < parties) current = propagate_ensemble(*record.channel, current);
        run.parties.push_back(std::move(record));
    }
    run.termination = Termination::party_budget;
    return run;
}

int admissible_from_bound(double bound) {
    if (!std::isfinite(bound)) return std::numeric_limits<int>::max();
    const double fl = std::floor(bound);
    // strict inequality: an exactly integral bound admits one party fewer
    int r = (bound - fl < 1e-12) ? static_cast<int>(fl) - 1 : static_cast<int>(fl);
    return std::max(r, 0);
}

PartyBound max_parties_two_state(double s1, double eta0, double delta) {
    if (!(s1 > 0.0 && s1 < 1.0)) throw ParamOutOfRange("s1 must lie in (0,1)");
    if (!(eta0 > 0.0 && eta0 <= 1.0)) throw ParamOutOfRange("eta0 must lie in (0,1]");
    if (!(delta > 0.0 && delta <= 1.0 - s1))
        throw ParamOutOfRange("delta must lie in (0, 1 - s1]");
    if (eta0 == 1.0) {
        const double inf = std::numeric_limits<double>::infinity();
        return PartyBound{inf, admissible_from_bound(inf)};
    }
    const double bound = std::log(s1 / (1.0 - delta)) / std::log(eta0);
    return PartyBound{bound, admissible_from_bound(bound)};
}

int iterate_parties_two_state(double s1, double eta0, double delta, int cap) {
    if (!(s1 > 0.0 && s1 < 1.0)) throw ParamOutOfRange("s1 must lie in (0,1)");
    if (!(eta0 > 0.0 && eta0 <= 1.0)) throw ParamOutOfRange("eta0 must lie in (0,1]");
    if (!(delta > 0.0 && delta <= 1.0 - s1))
        throw ParamOutOfRange("delta must lie in (0, 1 - s1]");
    int r = 0;
    double s = s1;
    while (r < cap && s / eta0 < 1.0 - delta) {
        s /= eta0;
        ++r;
    }
    return r;
}

DpiReport check_dpi(const DensityOperator& rho1, const DensityOperator& rho2,
                    const KrausChannel& channel) {
    if (rho1.dim() != rho2.dim() || rho1.dim() != channel.dim())
        throw DimensionMismatch("check_dpi dimension mismatch");
    const double before = trace_norm(rho1.matrix() - rho2.matrix());
    const double after = trace_norm(apply_channel(channel, rho1).matrix() -
                                    apply_channel(channel, rho2).matrix());
    return DpiReport{before, after, before >= after - tol::structural};
}

}  // namespace seqmc
