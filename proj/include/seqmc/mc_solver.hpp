#pragma once

#include <optional>

#include "seqmc/channels.hpp"

namespace seqmc {

// Result of the per-outcome confidence maximization
//
//   C_x = max over rank-one M of  q_x tr[rho_x M] / tr[rho M],
//
// solved as the largest generalized eigenvalue of q_x rho_x v = C rho v
// restricted to the support of rho.
struct MaxConfidence {
    double confidence;
    PureState direction;
    bool degenerate;  // top generalized eigenvalue is (numerically) repeated
};

struct OutcomeSolution {
    double confidence;             // C_x
    PureState direction;           // |m~_x>
    double weight;                 // c_x, element M_x = c_x |m~_x><m~_x|
    DensityOperator complementary; // sigma_x with tr[M_x sigma_x] = 0
    double lagrange_weight;        // r_x >= 0
    bool degenerate;
};

struct MCSolution {
    std::vector<OutcomeSolution> outcomes;  // index i <-> outcome i+1
    ComplexMatrix m0;

    int dim() const { return m0.dim(); }
    int conclusive_count() const { return static_cast<int>(outcomes.size()); }
    Povm to_povm() const;
    std::vector<PureState> directions() const;
    std::vector<double> weights() const;
    // |<m~_1|m~_2>| for two-outcome solutions
    double direction_overlap() const;
};

MaxConfidence max_confidence_element(const Ensemble& ens, int outcome);

// Full solution with the default weights: maximal equal c keeping M0 PSD,
// found by bisection to 1e-10.
MCSolution solve_mc(const Ensemble& ens);
MCSolution solve_mc_with_weights(const Ensemble& ens, const std::vector<double>& weights);

// Closed form for the symmetric two-state family: complementary states,
// POVM directions orthogonal to them, and
// C = (1 + p sin(theta) / sqrt(1 - p^2 cos^2(theta))) / 2.
// Weights default to the maximal equal value keeping M0 PSD.
MCSolution two_state_closed_form(double p, double theta,
                                 std::optional<double> weight_override = std::nullopt);
double two_state_confidence(double p, double theta);

struct OutcomeCertificate {
    double min_eigenvalue;      // of C_x rho - q_x rho_x
    double slackness_residual;  // |tr[(C_x rho - q_x rho_x) M_x]|
    double stability_defect;    // max-abs of C_x rho - q_x rho_x - r_x sigma_x
    bool pass;
};

struct OptimalityCertificate {
    std::vector<OutcomeCertificate> outcomes;
    bool pass;
};

// Checks C_x rho - q_x rho_x >= 0 and the complementary slackness per
// outcome, plus Lagrangian stability as an operator identity.
OptimalityCertificate certify_optimality(const Ensemble& ens, const MCSolution& sol);

struct GuessingReport {
    double guessing_probability;  // G = sum_x C_x eta_x
    double eta0;                  // tr[rho M0]
    std::vector<double> eta;      // per conclusive outcome
};

GuessingReport guessing_probability(const Ensemble& ens, const MCSolution& sol);

// Grid oracle: maximizes the confidence ratio over rank-one projectors on
// a polar x azimuthal Bloch mesh, then one local refinement pass.  Lower
// bound on C_x that converges as the grid grows.
double brute_force_confidence_qubit(const Ensemble& ens, int outcome, int grid);

// M_x = c_x |m~_x><m~_x|, M0 = I - sum; throws InfeasibleWeights if M0
// picks up a negative eigenvalue.
Povm assemble_povm(const MCSolution& sol, const std::vector<double>& weights);

// Largest equal weight keeping I - c sum_x |m~_x><m~_x| PSD.
double max_equal_weight(const std::vector<PureState>& directions);

}  // namespace seqmc
