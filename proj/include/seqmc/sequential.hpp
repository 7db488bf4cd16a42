#pragma once

#include <optional>
#include <string>

#include "seqmc/mc_solver.hpp"

namespace seqmc {

// Inter-party channel compiled from an MC measurement:
//   K_x = sqrt(c_x) |m_x^(next)><m~_x|,   K_0 = sum_x sqrt(a_x) |m_x^(next)><m~_x|.
// Completeness pins a_x = |<phi_x|m~_x>|^{-2} - c_x (phi_x the dual family
// of the directions) and forces the Gram matrix of the weighted targets.
struct ChannelPlan {
    std::vector<double> conclusive_weights;    // c_x
    std::vector<double> inconclusive_weights;  // a_x
    std::vector<PureState> directions;         // m~_x
    std::vector<PureState> targets;            // m_x^(next)
    KrausChannel channel;                      // outcome order 0..n
};

// Dual family, inconclusive weights, and the target Gram matrix required
// for completeness.  Throws InfeasibleGram when the directions are
// linearly dependent (or do not span the space) and WeightsTooLarge when
// some a_x is forced negative.
struct GramConstruction {
    std::vector<PureState> duals;              // phi_x with <m~_y|phi_x> = 0 for y != x
    std::vector<double> inconclusive_weights;  // a_x
    ComplexMatrix required_gram;               // G_xy = sqrt(a_x a_y) <t_x|t_y>
};

GramConstruction sequential_gram(const std::vector<PureState>& directions,
                                 const std::vector<double>& weights);

// targets empty -> factor the required Gram (InfeasibleGram if it is not
// PSD).  Explicit targets are verified against the Gram consistency
// equation.  Explicit inconclusive weights must match the forced values.
ChannelPlan build_sequential_channel(const MCSolution& sol,
                                     std::optional<std::vector<PureState>> targets = std::nullopt,
                                     std::optional<std::vector<double>> inconclusive = std::nullopt);

// Symmetric real target pair with signed overlap <t_1|t_2> = s.
std::vector<PureState> symmetric_pair_targets(double signed_overlap);

struct OverlapGrowth {
    double t_factor;      // T = [(1-c_1 D^2)(1-c_2 D^2)]^{-1/2}
    double overlap_out;   // T * overlap_in
};

OverlapGrowth overlap_growth(double c1, double c2, double overlap_in);

struct LeastDisturbingParams {
    double c1;
    double c2;
    double next_overlap;  // s = overlap / (1 - G/C)
};

// Weights minimizing the next-party direction overlap at fixed guessing
// probability; c_1 = c_2 = G / (C (1 - overlap^2)).
LeastDisturbingParams least_disturbing_params(double confidence, double guessing_target,
                                              double overlap);

enum class PolicyKind { guessing_target, inconclusive_rate, fixed_weight };

struct SequentialPolicy {
    PolicyKind kind = PolicyKind::inconclusive_rate;
    double value = 0.8;           // G target, eta0 target, or weight/strength
    double delta = 1e-3;          // stop when the direction overlap reaches 1 - delta
    double min_confidence = 0.0;  // stop when max_x C_x <= this
};

enum class Termination {
    party_budget,
    confidence_threshold,
    overlap_saturated,
    construction_failure,
};

std::string termination_name(Termination t);

struct PartyRecord {
    int index;  // 1-based
    Ensemble input;
    MCSolution solution;
    double eta0;
    double guessing;
    ComplexMatrix direction_gram;         // <m~_i|m~_j>
    double overlap;                       // |gram_12| (two outcomes) else max off-diagonal
    std::optional<ChannelPlan> plan;      // linearly independent path only
    std::optional<KrausChannel> channel;  // set whenever a channel was built
};

struct SequentialRun {
    std::vector<PartyRecord> parties;
    Termination termination;
    std::string note;

    std::vector<KrausChannel> channels() const;  // of the recorded parties
};

// Runs up to `parties` rounds.  Linearly independent conclusive
// directions go through the Gram-compiled channel (least-disturbing
// symmetric targets when the required overlap is real, the factored Gram
// otherwise); dependent directions fall back to the weak-measurement
// channel with strength derived from the policy.
SequentialRun run_sequential(const Ensemble& ens, int parties, const SequentialPolicy& policy);

struct PartyBound {
    double bound;    // real-valued right-hand side of the strict bound
    int admissible;  // largest integer strictly below the bound, floored at 0
};

int admissible_from_bound(double bound);

// R < log(s1/(1-delta)) / log(eta0)
PartyBound max_parties_two_state(double s1, double eta0, double delta);
int iterate_parties_two_state(double s1, double eta0, double delta, int cap = 1000000);

struct DpiReport {
    double distance_in;   // ||rho_1 - rho_2||_1
    double distance_out;  // ||E(rho_1) - E(rho_2)||_1
    bool pass;            // distance_in >= distance_out - 1e-9
};

DpiReport check_dpi(const DensityOperator& rho1, const DensityOperator& rho2,
                    const KrausChannel& channel);

}  // namespace seqmc
