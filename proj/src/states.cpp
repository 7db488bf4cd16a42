#include "seqmc/states.hpp"

#include <cmath>
#include <numbers>

namespace seqmc {

namespace {

void phase_fix(Cvec& v) {
    for (const Complex& a : v) {
        double m = std::abs(a);
        if (m > 1e-12) {
            Complex rot = std::conj(a) / m;
            for (Complex& b : v) b *= rot;
            return;
        }
    }
}

}  // namespace

PureState PureState::from_amplitudes(Cvec amplitudes, bool renormalize, bool fix_phase) {
    if (amplitudes.empty()) throw DimensionMismatch("empty amplitude vector");
    if (static_cast<int>(amplitudes.size()) > max_dimension())
        throw DimensionMismatch("state dimension exceeds cap");
    for (const Complex& a : amplitudes)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw ParamOutOfRange("amplitudes must be finite");
    double len = norm(amplitudes);
    if (renormalize) {
        if (len < 1e-150) throw ParamOutOfRange("cannot normalize the zero vector");
        for (Complex& a : amplitudes) a /= len;
    } else if (std::abs(len - 1.0) > 1e-10) {
        throw ParamOutOfRange("state vector norm deviates from 1 by more than 1e-10");
    } else if (len != 1.0) {
        for (Complex& a : amplitudes) a /= len;
    }
    if (fix_phase) phase_fix(amplitudes);
    return PureState(std::move(amplitudes));
}

PureState PureState::basis(int dim, int index) {
    if (index < 0 || index >= dim) throw ParamOutOfRange("basis index out of range");
    Cvec v(dim, Complex(0.0, 0.0));
    v[static_cast<size_t>(index)] = 1.0;
    return PureState(std::move(v));
}

ComplexMatrix PureState::projector() const { return outer(amps_, amps_); }

PureState PureState::perp() const {
    if (dim() != 2) throw NotQubit("perp is defined for qubits only");
    Cvec v{std::conj(amps_[1]), -std::conj(amps_[0])};
    phase_fix(v);
    return PureState(std::move(v));
}

Complex inner(const PureState& a, const PureState& b) { return inner(a.amplitudes(), b.amplitudes()); }

double overlap(const PureState& a, const PureState& b) { return std::abs(inner(a, b)); }

DensityOperator DensityOperator::from_matrix(ComplexMatrix m) {
    if (m.hermiticity_defect() > tol::structural)
        throw NotHermitian("density operator is not Hermitian within 1e-9");
    if (std::abs(m.trace().real() - 1.0) > tol::structural ||
        std::abs(m.trace().imag()) > tol::structural)
        throw ParamOutOfRange("density operator trace deviates from 1");
    HermitianSpectrum s = eig_hermitian(m);
    if (s.eigenvalues.back() < -tol::structural)
        throw NotPsd("density operator has eigenvalue " + std::to_string(s.eigenvalues.back()));
    return DensityOperator(std::move(m));
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
    return DensityOperator(psi.projector());
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
    ComplexMatrix m = ComplexMatrix::identity(dim);
    m *= Complex(1.0 / dim, 0.0);
    return DensityOperator(std::move(m));
}

double DensityOperator::purity() const { return (matrix_ * matrix_).trace().real(); }

Ensemble Ensemble::create(std::vector<double> priors, std::vector<DensityOperator> states,
                          std::string label) {
    if (priors.empty() || priors.size() != states.size())
        throw DimensionMismatch("ensemble priors/states count mismatch");
    double sum = 0.0;
    for (double q : priors) {
        if (!(q >= 0.0 && q <= 1.0)) throw ParamOutOfRange("priors must lie in [0,1]");
        sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw ParamOutOfRange("priors must sum to 1");
    const int d = states.front().dim();
    for (const DensityOperator& s : states)
        if (s.dim() != d) throw DimensionMismatch("ensemble states of unequal dimension");
    return Ensemble{std::move(priors), std::move(states), std::move(label)};
}

DensityOperator Ensemble::average() const {
    ComplexMatrix m(dim());
    for (size_t i = 0; i < states.size(); ++i) {
        ComplexMatrix term = states[i].matrix();
        term *= Complex(priors[i], 0.0);
        m += term;
    }
    return DensityOperator::from_matrix(std::move(m));
}

Ensemble two_state_ensemble(double p, double theta) {
    if (!(p > 0.0 && p <= 1.0)) throw ParamOutOfRange("p must lie in (0,1]");
    if (!(theta > 0.0 && theta < std::numbers::pi))
        throw ParamOutOfRange("theta must lie in (0,pi)");

    auto state = [&](int x) {
        double sign = (x == 1) ? 1.0 : -1.0;
        PureState psi = PureState::from_amplitudes(
            {Complex(std::cos(theta / 2.0), 0.0), Complex(sign * std::sin(theta / 2.0), 0.0)},
            true);
        ComplexMatrix m = psi.projector();
        m *= Complex(p, 0.0);
        ComplexMatrix mix = ComplexMatrix::identity(2);
        mix *= Complex((1.0 - p) / 2.0, 0.0);
        m += mix;
        return DensityOperator::from_matrix(std::move(m));
    };
    return Ensemble::create({0.5, 0.5}, {state(1), state(2)},
                            "two_state(p=" + std::to_string(p) + ",theta=" + std::to_string(theta) + ")");
}

PureState gu_state(int n, int k) {
    if (n < 2) throw ParamOutOfRange("gu states need n >= 2");
    if (k < 1 || k > n) throw ParamOutOfRange("gu state index out of range");
    const double phase = 2.0 * std::numbers::pi * k / n;
    const double r = 1.0 / std::sqrt(2.0);
    return PureState::from_amplitudes(
        {Complex(r, 0.0), Complex(r * std::cos(phase), r * std::sin(phase))}, true);
}

Ensemble gu_ensemble(int n) {
    if (n < 2) throw ParamOutOfRange("gu ensemble needs n >= 2");
    std::vector<double> priors(n, 1.0 / n);
    std::vector<DensityOperator> states;
    states.reserve(n);
    for (int k = 1; k <= n; ++k) states.push_back(DensityOperator::from_pure(gu_state(n, k)));
    return Ensemble::create(std::move(priors), std::move(states), "gu(n=" + std::to_string(n) + ")");
}

std::array<double, 3> bloch_from_density(const DensityOperator& rho) {
    if (rho.dim() != 2) throw NotQubit("bloch_from_density needs a qubit state");
    const ComplexMatrix& m = rho.matrix();
    return {2.0 * m.at(0, 1).real(), -2.0 * m.at(0, 1).imag(),
            (m.at(0, 0) - m.at(1, 1)).real()};
}

DensityOperator density_from_bloch(const std::array<double, 3>& v) {
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (len > 1.0 + 1e-10) throw BlochOutOfBall("Bloch vector length " + std::to_string(len));
    ComplexMatrix m(2);
    m.at(0, 0) = 0.5 * (1.0 + v[2]);
    m.at(1, 1) = 0.5 * (1.0 - v[2]);
    m.at(0, 1) = 0.5 * Complex(v[0], -v[1]);
    m.at(1, 0) = 0.5 * Complex(v[0], v[1]);
    return DensityOperator::from_matrix(std::move(m));
}

}  // namespace seqmc
