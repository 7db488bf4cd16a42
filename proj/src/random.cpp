#include "seqmc/random.hpp"

#include <cmath>
#include <numbers>

namespace seqmc {

uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t counter_value(uint64_t seed, uint64_t stream, uint64_t step) {
    return mix64(mix64(mix64(seed) ^ stream) ^ step);
}

double counter_uniform(uint64_t seed, uint64_t stream, uint64_t step) {
    return static_cast<double>(counter_value(seed, stream, step) >> 11) * 0x1.0p-53;
}

double RngStream::next_uniform() { return counter_uniform(seed_, stream_, step_++); }

double RngStream::next_gaussian() {
    double u1 = next_uniform();
    double u2 = next_uniform();
    // 1-u1 keeps the log argument in (0,1]
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream RngStream::substream(uint64_t index) const {
    return RngStream(seed_, mix64(stream_ ^ (0x5851f42d4c957f2dULL + index)));
}

PureState haar_state(int dim, RngStream& rng) {
    Cvec amps(static_cast<size_t>(dim));
    for (Complex& a : amps) {
        double re = rng.next_gaussian();
        double im = rng.next_gaussian();
        a = Complex(re, im);
    }
    return PureState::from_amplitudes(std::move(amps), true);
}

DensityOperator ginibre_density(int dim, RngStream& rng) {
    ComplexMatrix g(dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g.at(r, c) = Complex(rng.next_gaussian(), rng.next_gaussian());
    ComplexMatrix rho = g * g.adjoint();
    double tr = rho.trace().real();
    rho *= Complex(1.0 / tr, 0.0);
    // symmetrize away the last bits of rounding noise
    ComplexMatrix sym(dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) sym.at(r, c) = 0.5 * (rho.at(r, c) + std::conj(rho.at(c, r)));
    return DensityOperator::from_matrix(std::move(sym));
}

ComplexMatrix random_hermitian(int dim, RngStream& rng) {
    ComplexMatrix h(dim);
    for (int r = 0; r < dim; ++r) {
        h.at(r, r) = Complex(rng.next_gaussian(), 0.0);
        for (int c = r + 1; c < dim; ++c) {
            Complex e(rng.next_gaussian(), rng.next_gaussian());
            h.at(r, c) = e;
            h.at(c, r) = std::conj(e);
        }
    }
    return h;
}

Ensemble random_qubit_ensemble(int n, RngStream& rng) {
    std::vector<double> priors(static_cast<size_t>(n));
    double sum = 0.0;
    for (double& q : priors) {
        q = rng.next_uniform() + 1e-3;  // bounded away from zero priors
        sum += q;
    }
    for (double& q : priors) q /= sum;
    std::vector<DensityOperator> states;
    states.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) states.push_back(ginibre_density(2, rng));
    return Ensemble::create(std::move(priors), std::move(states), "random_qubit");
}

}  // namespace seqmc
