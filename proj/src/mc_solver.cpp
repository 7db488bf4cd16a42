#include "seqmc/mc_solver.hpp"

#include <cmath>
#include <numbers>

namespace seqmc {

namespace {

// sigma_x = (C_x rho - q_x rho_x) / r_x, clamped to the PSD cone so the
// DensityOperator invariants hold even when r_x is tiny.  For r_x ~ 0 the
// remainder vanishes and any state orthogonal to the measured direction
// satisfies slackness; we use the normalized complement projector.
std::pair<DensityOperator, double> complementary_from_remainder(const ComplexMatrix& delta,
                                                                const PureState& direction) {
    double r = trace_norm(delta);
    if (r < 1e-9) {
        const int d = delta.dim();
        ComplexMatrix comp = ComplexMatrix::identity(d) - direction.projector();
        comp *= Complex(1.0 / (d - 1), 0.0);
        return {DensityOperator::from_matrix(std::move(comp)), r};
    }
    HermitianSpectrum s = eig_hermitian(delta);
    ComplexMatrix sigma(delta.dim());
    double tr = 0.0;
    for (int i = 0; i < delta.dim(); ++i) tr += std::max(s.eigenvalues[i], 0.0);
    for (int i = 0; i < delta.dim(); ++i) {
        double lam = std::max(s.eigenvalues[i], 0.0) / tr;
        if (lam == 0.0) continue;
        Cvec v = s.eigenvector(i);
        for (int rr = 0; rr < delta.dim(); ++rr)
            for (int cc = 0; cc < delta.dim(); ++cc)
                sigma.at(rr, cc) += lam * v[rr] * std::conj(v[cc]);
    }
    return {DensityOperator::from_matrix(std::move(sigma)), r};
}

MCSolution finish_solution(const Ensemble& ens, std::vector<MaxConfidence> raw,
                           std::vector<double> weights) {
    const int d = ens.dim();
    const int n = ens.size();
    ComplexMatrix rho = ens.average().matrix();

    ComplexMatrix m0 = ComplexMatrix::identity(d);
    for (int x = 0; x < n; ++x) {
        ComplexMatrix mx = raw[static_cast<size_t>(x)].direction.projector();
        mx *= Complex(weights[static_cast<size_t>(x)], 0.0);
        m0 -= mx;
    }
    HermitianSpectrum s0 = eig_hermitian(m0);
    if (s0.eigenvalues.back() < -tol::structural)
        throw InfeasibleWeights("weights leave M0 non-PSD", s0.eigenvalues.back());

    MCSolution sol{{}, std::move(m0)};
    sol.outcomes.reserve(static_cast<size_t>(n));
    for (int x = 0; x < n; ++x) {
        const MaxConfidence& mc = raw[static_cast<size_t>(x)];
        ComplexMatrix delta = rho;
        delta *= Complex(mc.confidence, 0.0);
        ComplexMatrix scaled = ens.states[static_cast<size_t>(x)].matrix();
        scaled *= Complex(ens.priors[static_cast<size_t>(x)], 0.0);
        delta -= scaled;
        auto [sigma, r] = complementary_from_remainder(delta, mc.direction);
        sol.outcomes.push_back(OutcomeSolution{mc.confidence, mc.direction,
                                               weights[static_cast<size_t>(x)], std::move(sigma),
                                               r, mc.degenerate});
    }
    return sol;
}

}  // namespace

Povm MCSolution::to_povm() const {
    std::vector<ComplexMatrix> elements;
    std::vector<std::optional<RankOneView>> views;
    elements.push_back(m0);
    views.push_back(std::nullopt);
    for (const OutcomeSolution& o : outcomes) {
        ComplexMatrix mx = o.direction.projector();
        mx *= Complex(o.weight, 0.0);
        elements.push_back(std::move(mx));
        views.push_back(RankOneView{o.weight, o.direction});
    }
    return Povm::from_elements(std::move(elements), std::move(views));
}

std::vector<PureState> MCSolution::directions() const {
    std::vector<PureState> out;
    out.reserve(outcomes.size());
    for (const OutcomeSolution& o : outcomes) out.push_back(o.direction);
    return out;
}

std::vector<double> MCSolution::weights() const {
    std::vector<double> out;
    out.reserve(outcomes.size());
    for (const OutcomeSolution& o : outcomes) out.push_back(o.weight);
    return out;
}

double MCSolution::direction_overlap() const {
    if (outcomes.size() != 2)
        throw ParamOutOfRange("direction_overlap is defined for two-outcome solutions");
    return overlap(outcomes[0].direction, outcomes[1].direction);
}

MaxConfidence max_confidence_element(const Ensemble& ens, int outcome) {
    if (outcome < 1 || outcome > ens.size()) throw ParamOutOfRange("outcome label out of range");
    const int d = ens.dim();
    const double q = ens.priors[static_cast<size_t>(outcome - 1)];
    const ComplexMatrix& rho_x = ens.states[static_cast<size_t>(outcome - 1)].matrix();

    HermitianSpectrum rho_spec = eig_hermitian(ens.average().matrix());
    const double lmax = rho_spec.eigenvalues.front();

    // rho^{-1/2} on the support; the support projector for the leak check.
    ComplexMatrix w(d);
    ComplexMatrix support(d);
    for (int i = 0; i < d; ++i) {
        if (rho_spec.eigenvalues[i] <= tol::support * lmax) continue;
        const double inv_sqrt = 1.0 / std::sqrt(rho_spec.eigenvalues[i]);
        Cvec v = rho_spec.eigenvector(i);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                w.at(r, c) += inv_sqrt * v[r] * std::conj(v[c]);
                support.at(r, c) += v[r] * std::conj(v[c]);
            }
    }
    const double leak = 1.0 - (support * rho_x).trace().real();
    if (leak > tol::structural)
        throw SingularAverage("rho_" + std::to_string(outcome) +
                              " leaks outside the support of the average by " +
                              std::to_string(leak));

    ComplexMatrix b = w * rho_x * w;
    b *= Complex(q, 0.0);
    HermitianSpectrum bs = eig_hermitian(b);
    const double top = bs.eigenvalues.front();
    const bool degenerate = d > 1 && (top - bs.eigenvalues[1]) <= 1e-10 * std::max(1.0, top);

    Cvec dir = matvec(w, bs.eigenvector(0));
    return MaxConfidence{top, PureState::from_amplitudes(std::move(dir), true), degenerate};
}

double max_equal_weight(const std::vector<PureState>& directions) {
    if (directions.empty()) throw ParamOutOfRange("max_equal_weight needs directions");
    const int d = directions.front().dim();
    ComplexMatrix sum(d);
    for (const PureState& m : directions) sum += m.projector();

    auto feasible = [&](double c) {
        ComplexMatrix m0 = ComplexMatrix::identity(d);
        ComplexMatrix scaled = sum;
        scaled *= Complex(c, 0.0);
        m0 -= scaled;
        return eig_hermitian(m0).eigenvalues.back() >= -1e-12;
    };

    double lo = 0.0;
    double hi = static_cast<double>(d) + 1.0;
    // well inside the 1e-10 contract; channel constructions compound the
    // weight error over parties, so leave headroom
    while (hi - lo > 1e-13) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

MCSolution solve_mc(const Ensemble& ens) {
    std::vector<MaxConfidence> raw;
    raw.reserve(static_cast<size_t>(ens.size()));
    std::vector<PureState> dirs;
    for (int x = 1; x <= ens.size(); ++x) {
        raw.push_back(max_confidence_element(ens, x));
        dirs.push_back(raw.back().direction);
    }
    const double c = max_equal_weight(dirs);
    return finish_solution(ens, std::move(raw), std::vector<double>(ens.states.size(), c));
}

MCSolution solve_mc_with_weights(const Ensemble& ens, const std::vector<double>& weights) {
    if (static_cast<int>(weights.size()) != ens.size())
        throw DimensionMismatch("weight count must match outcome count");
    for (double c : weights)
        if (!(c >= 0.0) || !std::isfinite(c)) throw ParamOutOfRange("weights must be >= 0");
    std::vector<MaxConfidence> raw;
    raw.reserve(static_cast<size_t>(ens.size()));
    for (int x = 1; x <= ens.size(); ++x) raw.push_back(max_confidence_element(ens, x));
    return finish_solution(ens, std::move(raw), weights);
}

double two_state_confidence(double p, double theta) {
    if (!(p > 0.0 && p <= 1.0)) throw ParamOutOfRange("p must lie in (0,1]");
    if (!(theta > 0.0 && theta < std::numbers::pi))
        throw ParamOutOfRange("theta must lie in (0,pi)");
    const double pc = p * std::cos(theta);
    return 0.5 * (1.0 + p * std::sin(theta) / std::sqrt(1.0 - pc * pc));
}

MCSolution two_state_closed_form(double p, double theta, std::optional<double> weight_override) {
    const double c_conf = two_state_confidence(p, theta);  // validates params
    const double pc = p * std::cos(theta);
    const double a = std::sqrt((1.0 + pc) / 2.0);
    const double b = std::sqrt((1.0 - pc) / 2.0);

    // Complementary state for outcome x is anti-aligned with rho_x; the
    // measured direction is its qubit complement, so slackness holds by
    // construction.
    PureState comp1 = PureState::from_amplitudes({Complex(a, 0.0), Complex(-b, 0.0)}, true);
    PureState comp2 = PureState::from_amplitudes({Complex(a, 0.0), Complex(b, 0.0)}, true);
    PureState dir1 = comp1.perp();  // (b, a)
    PureState dir2 = comp2.perp();  // (b, -a)

    double c = weight_override ? *weight_override : max_equal_weight({dir1, dir2});
    if (!(c >= 0.0)) throw ParamOutOfRange("weight override must be >= 0");

    ComplexMatrix m0 = ComplexMatrix::identity(2);
    ComplexMatrix m1 = dir1.projector();
    m1 *= Complex(c, 0.0);
    ComplexMatrix m2 = dir2.projector();
    m2 *= Complex(c, 0.0);
    m0 -= m1;
    m0 -= m2;
    HermitianSpectrum s0 = eig_hermitian(m0);
    if (s0.eigenvalues.back() < -tol::structural)
        throw InfeasibleWeights("weights leave M0 non-PSD", s0.eigenvalues.back());

    const double r = c_conf - 0.5;
    MCSolution sol{{}, std::move(m0)};
    sol.outcomes.push_back(OutcomeSolution{c_conf, dir1, c, DensityOperator::from_pure(comp1), r, false});
    sol.outcomes.push_back(OutcomeSolution{c_conf, dir2, c, DensityOperator::from_pure(comp2), r, false});
    return sol;
}

OptimalityCertificate certify_optimality(const Ensemble& ens, const MCSolution& sol) {
    if (sol.conclusive_count() != ens.size())
        throw DimensionMismatch("solution/ensemble outcome count mismatch");
    const ComplexMatrix rho = ens.average().matrix();

    OptimalityCertificate cert{{}, true};
    for (int x = 0; x < sol.conclusive_count(); ++x) {
        const OutcomeSolution& o = sol.outcomes[static_cast<size_t>(x)];
        ComplexMatrix delta = rho;
        delta *= Complex(o.confidence, 0.0);
        ComplexMatrix scaled = ens.states[static_cast<size_t>(x)].matrix();
        scaled *= Complex(ens.priors[static_cast<size_t>(x)], 0.0);
        delta -= scaled;

        const double min_eig = eig_hermitian(delta).eigenvalues.back();
        const Cvec mdelta = matvec(delta, o.direction.amplitudes());
        const double residual = o.weight * std::abs(inner(o.direction.amplitudes(), mdelta));

        ComplexMatrix stab = o.complementary.matrix();
        stab *= Complex(o.lagrange_weight, 0.0);
        const double stability = max_abs_diff(delta, stab);

        const bool pass = min_eig >= -tol::decision && residual <= tol::decision;
        cert.outcomes.push_back(OutcomeCertificate{min_eig, residual, stability, pass});
        cert.pass = cert.pass && pass;
    }
    return cert;
}

GuessingReport guessing_probability(const Ensemble& ens, const MCSolution& sol) {
    if (sol.conclusive_count() != ens.size())
        throw DimensionMismatch("solution/ensemble outcome count mismatch");
    const ComplexMatrix rho = ens.average().matrix();

    GuessingReport report{0.0, 0.0, {}};
    for (const OutcomeSolution& o : sol.outcomes) {
        const Cvec rm = matvec(rho, o.direction.amplitudes());
        const double eta = o.weight * inner(o.direction.amplitudes(), rm).real();
        report.eta.push_back(eta);
        report.guessing_probability += o.confidence * eta;
    }
    report.eta0 = (sol.m0 * rho).trace().real();
    return report;
}

double brute_force_confidence_qubit(const Ensemble& ens, int outcome, int grid) {
    if (ens.dim() != 2) throw NotQubit("brute force oracle handles qubit ensembles only");
    if (outcome < 1 || outcome > ens.size()) throw ParamOutOfRange("outcome label out of range");
    if (grid < 2) throw ParamOutOfRange("grid must be >= 2");

    const double q = ens.priors[static_cast<size_t>(outcome - 1)];
    const auto rx = bloch_from_density(ens.states[static_cast<size_t>(outcome - 1)]);
    const auto r = bloch_from_density(ens.average());
    const double pi = std::numbers::pi;

    // One pass over a polar x azimuthal mesh with hoisted trigonometry.
    struct Best {
        double value = -1.0;
        double polar = 0.0;
        double azimuth = 0.0;
    };
    auto scan = [&](const std::vector<double>& polars, const std::vector<double>& azimuths) {
        std::vector<double> ca(azimuths.size()), sa(azimuths.size());
        for (size_t j = 0; j < azimuths.size(); ++j) {
            ca[j] = std::cos(azimuths[j]);
            sa[j] = std::sin(azimuths[j]);
        }
        Best best;
        for (double polar : polars) {
            const double sp = std::sin(polar);
            const double cp = std::cos(polar);
            const double num_z = 1.0 + rx[2] * cp;
            const double den_z = 1.0 + r[2] * cp;
            for (size_t j = 0; j < azimuths.size(); ++j) {
                const double nx = sp * ca[j];
                const double ny = sp * sa[j];
                const double den = den_z + r[0] * nx + r[1] * ny;
                if (den < 1e-15) continue;
                const double v = q * (num_z + rx[0] * nx + rx[1] * ny) / den;
                if (v > best.value) {
                    best.value = v;
                    best.polar = polar;
                    best.azimuth = azimuths[j];
                }
            }
        }
        return best;
    };

    std::vector<double> polars(static_cast<size_t>(grid)), azimuths(static_cast<size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        polars[static_cast<size_t>(i)] = pi * (i + 0.5) / grid;
        azimuths[static_cast<size_t>(i)] = 2.0 * pi * (i + 0.5) / grid;
    }
    Best coarse = scan(polars, azimuths);

    // One refinement pass around the coarse optimum.
    const double dpolar = 2.0 * pi / grid;
    const double dazimuth = 4.0 * pi / grid;
    for (int i = 0; i < grid; ++i) {
        polars[static_cast<size_t>(i)] =
            std::clamp(coarse.polar - dpolar + 2.0 * dpolar * i / (grid - 1), 0.0, pi);
        azimuths[static_cast<size_t>(i)] =
            coarse.azimuth - dazimuth + 2.0 * dazimuth * i / (grid - 1);
    }
    Best fine = scan(polars, azimuths);
    return std::max(coarse.value, fine.value);
}

Povm assemble_povm(const MCSolution& sol, const std::vector<double>& weights) {
    if (weights.size() != sol.outcomes.size())
        throw DimensionMismatch("weight count must match outcome count");
    const int d = sol.dim();
    std::vector<ComplexMatrix> elements;
    std::vector<std::optional<RankOneView>> views;
    ComplexMatrix m0 = ComplexMatrix::identity(d);
    elements.push_back(m0);  // placeholder, fixed below
    views.push_back(std::nullopt);
    for (size_t x = 0; x < weights.size(); ++x) {
        if (!(weights[x] >= 0.0)) throw ParamOutOfRange("weights must be >= 0");
        ComplexMatrix mx = sol.outcomes[x].direction.projector();
        mx *= Complex(weights[x], 0.0);
        m0 -= mx;
        views.push_back(RankOneView{weights[x], sol.outcomes[x].direction});
        elements.push_back(std::move(mx));
    }
    HermitianSpectrum s = eig_hermitian(m0);
    if (s.eigenvalues.back() < -tol::structural)
        throw InfeasibleWeights("assemble_povm: M0 not PSD", s.eigenvalues.back());
    elements[0] = std::move(m0);
    return Povm::from_elements(std::move(elements), std::move(views));
}

}  // namespace seqmc
