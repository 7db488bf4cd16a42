#include "seqmc/channels.hpp"

#include <cmath>

namespace seqmc {

Povm Povm::from_elements(std::vector<ComplexMatrix> elements,
                         std::vector<std::optional<RankOneView>> rank_one_views) {
    if (elements.empty()) throw DimensionMismatch("POVM needs at least the inconclusive element");
    const int d = elements.front().dim();
    for (const ComplexMatrix& e : elements)
        if (e.dim() != d) throw DimensionMismatch("POVM elements of unequal dimension");
    if (rank_one_views.empty()) rank_one_views.assign(elements.size(), std::nullopt);
    if (rank_one_views.size() != elements.size())
        throw DimensionMismatch("rank-one view count must match element count");
    return Povm(std::move(elements), std::move(rank_one_views));
}

PovmReport validate_povm(const Povm& povm) {
    PovmReport report;
    ComplexMatrix sum(povm.dim());
    for (int i = 0; i < povm.size(); ++i) sum += povm.element(i);
    report.completeness_defect = max_abs_diff(sum, ComplexMatrix::identity(povm.dim()));

    report.min_eigenvalues.reserve(povm.size());
    bool psd_ok = true;
    for (int i = 0; i < povm.size(); ++i) {
        HermitianSpectrum s = eig_hermitian(povm.element(i));
        report.min_eigenvalues.push_back(s.eigenvalues.back());
        psd_ok = psd_ok && s.eigenvalues.back() >= -tol::structural;
    }
    for (int i = 1; i < povm.size(); ++i) {
        const auto& view = povm.rank_one_view(i);
        if (!view) continue;
        ComplexMatrix rebuilt = view->direction.projector();
        rebuilt *= Complex(view->weight, 0.0);
        if (max_abs_diff(rebuilt, povm.element(i)) > tol::structural) psd_ok = false;
    }
    report.pass = psd_ok && report.completeness_defect <= tol::structural;
    return report;
}

KrausChannel KrausChannel::from_operators(std::vector<ComplexMatrix> operators) {
    if (operators.empty()) throw DimensionMismatch("channel needs at least one Kraus operator");
    const int d = operators.front().dim();
    for (const ComplexMatrix& k : operators)
        if (k.dim() != d) throw DimensionMismatch("Kraus operators of unequal dimension");
    KrausChannel ch(std::move(operators));
    double defect = ch.completeness_defect();
    if (defect > tol::hermiticity_error)
        throw IncompleteChannel("sum K^dagger K deviates from identity by " +
                                std::to_string(defect));
    return ch;
}

KrausChannel KrausChannel::identity(int dim) {
    return KrausChannel({ComplexMatrix::identity(dim)});
}

double KrausChannel::completeness_defect() const {
    ComplexMatrix sum(dim());
    for (const ComplexMatrix& k : ops_) sum += k.adjoint() * k;
    return max_abs_diff(sum, ComplexMatrix::identity(dim()));
}

double KrausChannel::outcome_probability(int outcome, const DensityOperator& rho) const {
    const ComplexMatrix& k = op(outcome);
    return (k * rho.matrix() * k.adjoint()).trace().real();
}

DensityOperator KrausChannel::collapse(int outcome, const DensityOperator& rho) const {
    const ComplexMatrix& k = op(outcome);
    ComplexMatrix post = k * rho.matrix() * k.adjoint();
    double p = post.trace().real();
    if (p <= 1e-300) throw ParamOutOfRange("collapse on a zero-probability outcome");
    post *= Complex(1.0 / p, 0.0);
    return DensityOperator::from_matrix(std::move(post));
}

DensityOperator apply_channel(const KrausChannel& channel, const DensityOperator& rho) {
    if (channel.dim() != rho.dim()) throw DimensionMismatch("channel/state dimension mismatch");
    double defect = channel.completeness_defect();
    if (defect > tol::hermiticity_error)
        throw IncompleteChannel("channel completeness defect " + std::to_string(defect));
    ComplexMatrix out(rho.dim());
    for (int i = 0; i < channel.size(); ++i)
        out += channel.op(i) * rho.matrix() * channel.op(i).adjoint();
    return DensityOperator::from_matrix(std::move(out));
}

Ensemble propagate_ensemble(const KrausChannel& channel, const Ensemble& ens) {
    std::vector<DensityOperator> out;
    out.reserve(ens.states.size());
    for (const DensityOperator& s : ens.states) out.push_back(apply_channel(channel, s));
    Ensemble result = Ensemble::create(ens.priors, std::move(out), ens.label);

    // Linearity check: the average must commute with the channel.
    double defect = max_abs_diff(result.average().matrix(),
                                 apply_channel(channel, ens.average()).matrix());
    if (defect > 1e-10)
        throw IncompleteChannel("propagation broke linearity by " + std::to_string(defect));
    return result;
}

}  // namespace seqmc
