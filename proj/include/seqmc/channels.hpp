#pragma once

#include <optional>
#include <vector>

#include "seqmc/states.hpp"

namespace seqmc {

struct RankOneView {
    double weight;
    PureState direction;
};

// POVM with outcome 0 reserved for the inconclusive element and
// conclusive outcomes 1..n aligned with ensemble labels.
class Povm {
  public:
    static Povm from_elements(std::vector<ComplexMatrix> elements,
                              std::vector<std::optional<RankOneView>> rank_one_views = {});

    int size() const { return static_cast<int>(elements_.size()); }  // includes outcome 0
    int conclusive_count() const { return size() - 1; }
    int dim() const { return elements_.front().dim(); }
    const ComplexMatrix& element(int outcome) const { return elements_[static_cast<size_t>(outcome)]; }
    const std::optional<RankOneView>& rank_one_view(int outcome) const {
        return views_[static_cast<size_t>(outcome)];
    }

  private:
    Povm(std::vector<ComplexMatrix> e, std::vector<std::optional<RankOneView>> v)
        : elements_(std::move(e)), views_(std::move(v)) {}
    std::vector<ComplexMatrix> elements_;
    std::vector<std::optional<RankOneView>> views_;
};

struct PovmReport {
    double completeness_defect;          // max-abs entry of sum(M_i) - I
    std::vector<double> min_eigenvalues; // per element, outcome order
    bool pass;                           // defect <= 1e-9 and min eig >= -1e-9
};

PovmReport validate_povm(const Povm& povm);

// Channel given by Kraus operators indexed by outcome label
// (0 inconclusive, 1..n conclusive).
class KrausChannel {
  public:
    // Throws IncompleteChannel if sum K_i^dagger K_i deviates from I by
    // more than 1e-6 in max-abs entry.
    static KrausChannel from_operators(std::vector<ComplexMatrix> operators);
    static KrausChannel identity(int dim);

    int size() const { return static_cast<int>(ops_.size()); }
    int dim() const { return ops_.front().dim(); }
    const ComplexMatrix& op(int outcome) const { return ops_[static_cast<size_t>(outcome)]; }
    double completeness_defect() const;

    // tr[K_i rho K_i^dagger]
    double outcome_probability(int outcome, const DensityOperator& rho) const;
    // K_i rho K_i^dagger / tr[...]; throws ParamOutOfRange on a
    // zero-probability outcome.
    DensityOperator collapse(int outcome, const DensityOperator& rho) const;

  private:
    explicit KrausChannel(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {}
    std::vector<ComplexMatrix> ops_;
};

DensityOperator apply_channel(const KrausChannel& channel, const DensityOperator& rho);
Ensemble propagate_ensemble(const KrausChannel& channel, const Ensemble& ens);

}  // namespace seqmc
