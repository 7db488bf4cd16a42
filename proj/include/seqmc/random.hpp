#pragma once

#include <cstdint>

#include "seqmc/states.hpp"

namespace seqmc {

// Counter-based generator: the value at (seed, stream, step) is
//
//   mix64(mix64(mix64(seed) ^ stream) ^ step)
//
// with mix64 the SplitMix64 finalizer.  There is no hidden state, so any
// (stream, step) cell can be evaluated independently; sharding streams
// across workers reproduces the single-threaded trajectory bit-for-bit.
uint64_t mix64(uint64_t z);
uint64_t counter_value(uint64_t seed, uint64_t stream, uint64_t step);
// [0,1), 53-bit mantissa
double counter_uniform(uint64_t seed, uint64_t stream, uint64_t step);

// Sequential view of one stream.  Gaussians come from Box-Muller over two
// consecutive uniforms.
class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

    double next_uniform();
    double next_gaussian();
    RngStream substream(uint64_t index) const;  // derived independent stream

  private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t step_ = 0;
};

// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
PureState haar_state(int dim, RngStream& rng);

// Ginibre-induced mixed state G G^dagger / tr[G G^dagger]; full rank
// almost surely.
DensityOperator ginibre_density(int dim, RngStream& rng);

// Gaussian Hermitian matrix (GUE-like, unnormalized).
ComplexMatrix random_hermitian(int dim, RngStream& rng);

// n Ginibre qubit states with normalized-uniform priors, for property tests.
Ensemble random_qubit_ensemble(int n, RngStream& rng);

}  // namespace seqmc
