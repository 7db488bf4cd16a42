#pragma once

#include <array>
#include <string>
#include <vector>

#include "seqmc/linalg.hpp"

namespace seqmc {

// Unit-norm state vector.  The global phase is fixed so the first nonzero
// amplitude is real positive, which makes comparisons deterministic.
class PureState {
  public:
    // Throws ParamOutOfRange unless the amplitudes are unit norm within
    // 1e-10 (or renormalize is set).  fix_phase=false keeps the caller's
    // phase; families of states with fixed relative phases need it.
    static PureState from_amplitudes(Cvec amplitudes, bool renormalize = false,
                                     bool fix_phase = true);
    static PureState basis(int dim, int index);

    int dim() const { return static_cast<int>(amps_.size()); }
    const Cvec& amplitudes() const { return amps_; }
    Complex amplitude(int i) const { return amps_[static_cast<size_t>(i)]; }

    ComplexMatrix projector() const;
    // Orthogonal qubit state; throws NotQubit for dim != 2.
    PureState perp() const;

  private:
    explicit PureState(Cvec amps) : amps_(std::move(amps)) {}
    Cvec amps_;
};

Complex inner(const PureState& a, const PureState& b);
double overlap(const PureState& a, const PureState& b);  // |<a|b>|

// Hermitian, PSD, unit-trace operator (all validated at 1e-9).
class DensityOperator {
  public:
    static DensityOperator from_matrix(ComplexMatrix m);
    static DensityOperator from_pure(const PureState& psi);
    static DensityOperator maximally_mixed(int dim);

    int dim() const { return matrix_.dim(); }
    const ComplexMatrix& matrix() const { return matrix_; }
    double purity() const;

  private:
    explicit DensityOperator(ComplexMatrix m) : matrix_(std::move(m)) {}
    ComplexMatrix matrix_;
};

struct Ensemble {
    std::vector<double> priors;
    std::vector<DensityOperator> states;
    std::string label;

    static Ensemble create(std::vector<double> priors, std::vector<DensityOperator> states,
                           std::string label);

    int size() const { return static_cast<int>(states.size()); }
    int dim() const { return states.front().dim(); }
    DensityOperator average() const;
};

// Pair of qubit mixed states p |psi_x><psi_x| + (1-p)/2 I with equal
// priors; |psi_1>, |psi_2> at polar angles +-theta from the z axis.
Ensemble two_state_ensemble(double p, double theta);

// Geometric-uniform states |psi_k> = (|0> + e^{2 pi i k / n} |1>)/sqrt(2),
// k = 1..n, equal priors 1/n.
Ensemble gu_ensemble(int n);
PureState gu_state(int n, int k);

std::array<double, 3> bloch_from_density(const DensityOperator& rho);
DensityOperator density_from_bloch(const std::array<double, 3>& v);

}  // namespace seqmc
