#pragma once

#include <cstdint>
#include <vector>

#include "seqmc/channels.hpp"
#include "seqmc/random.hpp"

namespace seqmc {

// Joint (true label, outcome) frequencies of a simulated sequential run.
// Party indices are 1-based, labels 1..n, outcomes 0..n with 0 the
// inconclusive outcome.
struct SampleStats {
    int parties = 0;
    int labels = 0;
    uint64_t trials = 0;
    // counts[j-1][label-1][outcome]
    std::vector<std::vector<std::vector<uint64_t>>> counts;

    uint64_t outcome_count(int party, int outcome) const;
    double outcome_frequency(int party, int outcome) const;
    double empirical_eta0(int party) const { return outcome_frequency(party, 0); }
    // freq(label = x and outcome = x) / freq(outcome = x); NaN if the
    // outcome never occurred.
    double empirical_confidence(int party, int outcome) const;
    // 1-sigma binomial error sqrt(c(1-c)/N) of the confidence estimate
    double confidence_sigma(int party, int outcome) const;
};

// Monte Carlo oracle.  Trial t draws the true label with the counter RNG
// at (stream=t, step=0); party j then draws its outcome at step j with
// probability tr[K_x rho K_x^dagger] and the state collapses to
// K_x rho K_x^dagger / tr[..].  Trajectories depend only on (seed, t), so
// results are reproducible and shard-independent.
SampleStats sample_run(const Ensemble& ens, const std::vector<KrausChannel>& channels,
                       uint64_t seed, uint64_t trials);

}  // namespace seqmc
