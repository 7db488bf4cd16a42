#pragma once

#include <span>

#include "seqmc/sequential.hpp"

namespace seqmc {

// POVM scaled toward the identity: N_x = eps M_x for conclusive outcomes,
// N_0 = (1 - eps) I + eps M_0.  Valid for any eps in [0,1]; eps = 1
// reproduces the base measurement.
struct WeakenedPovm {
    double strength;  // eps
    Povm base;
    Povm weakened;
};

WeakenedPovm weaken_povm(const Povm& povm, double eps);

// Square-root Kraus operators K_i = sqrt(N_i) with the gauge unitaries
// fixed to the identity.
KrausChannel weak_channel(const WeakenedPovm& povm);

// The measurement itself as a channel, K_i = sqrt(M_i).  Outcome
// statistics match the POVM for any gauge choice.
KrausChannel measurement_channel(const Povm& povm);

// Post-measurement state of the geometric-uniform weak channel:
// p_+ |psi_x><psi_x| + p_- |psi_x^perp><psi_x^perp| with
// p_+- = (1 +- (1 + eta0)/2) / 2.
DensityOperator gu_post_state(int n, double eta0, int label);

// C^(j) = (1 + prod_{k<j} (1 + eta0_k)/2) / n; the j = 1 value is 2/n.
double gu_sequential_confidence(int n, std::span<const double> eta0s, int party);

// |a^(j)| = prod_k (1 + eta0_k)/2
double gu_bloch_length(std::span<const double> eta0s);

// R < 1 + log(n C_th - 1) / log((1 + eta0)/2)
PartyBound max_parties_gu(int n, double c_th, double eta0);
int iterate_parties_gu(int n, double c_th, double eta0, int cap = 1000000);

struct ConfidenceDrop {
    double base_confidence;      // C^(1) for outcome 1
    double weakened_confidence;  // exact C^(2) after the eps-weak channel
    double fitted_slope;         // least-squares slope of (C1 - C2)/C1 vs eps
};

// Exact next-party confidence after an eps-weak channel plus the fitted
// linear coefficient of the relative drop over an eps mesh.
ConfidenceDrop confidence_drop_small_eps(const Povm& povm, const Ensemble& ens, double eps);

}  // namespace seqmc
