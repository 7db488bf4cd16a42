#include "seqmc/weakmeas.hpp"

#include <cmath>
#include <limits>

namespace seqmc {

WeakenedPovm weaken_povm(const Povm& povm, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ParamOutOfRange("strength must lie in [0,1]");
    std::vector<ComplexMatrix> elements;
    std::vector<std::optional<RankOneView>> views;
    elements.reserve(static_cast<size_t>(povm.size()));

    ComplexMatrix n0 = ComplexMatrix::identity(povm.dim());
    n0 *= Complex(1.0 - eps, 0.0);
    ComplexMatrix scaled_m0 = povm.element(0);
    scaled_m0 *= Complex(eps, 0.0);
    n0 += scaled_m0;
    elements.push_back(std::move(n0));
    views.push_back(std::nullopt);

    for (int x = 1; x < povm.size(); ++x) {
        ComplexMatrix nx = povm.element(x);
        nx *= Complex(eps, 0.0);
        elements.push_back(std::move(nx));
        const auto& view = povm.rank_one_view(x);
        if (view)
            views.push_back(RankOneView{eps * view->weight, view->direction});
        else
            views.push_back(std::nullopt);
    }
    return WeakenedPovm{eps, povm, Povm::from_elements(std::move(elements), std::move(views))};
}

KrausChannel weak_channel(const WeakenedPovm& povm) {
    std::vector<ComplexMatrix> ops;
    ops.reserve(static_cast<size_t>(povm.weakened.size()));
    for (int i = 0; i < povm.weakened.size(); ++i)
        ops.push_back(matrix_sqrt_psd(povm.weakened.element(i)));
    return KrausChannel::from_operators(std::move(ops));
}

KrausChannel measurement_channel(const Povm& povm) {
    std::vector<ComplexMatrix> ops;
    ops.reserve(static_cast<size_t>(povm.size()));
    for (int i = 0; i < povm.size(); ++i) ops.push_back(matrix_sqrt_psd(povm.element(i)));
    return KrausChannel::from_operators(std::move(ops));
}

DensityOperator gu_post_state(int n, double eta0, int label) {
    if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw ParamOutOfRange("eta0 must lie in [0,1]");
    const PureState psi = gu_state(n, label);
    const double p_plus = 0.5 * (1.0 + 0.5 * (1.0 + eta0));
    const double p_minus = 1.0 - p_plus;
    ComplexMatrix m = psi.projector();
    m *= Complex(p_plus, 0.0);
    ComplexMatrix perp = psi.perp().projector();
    perp *= Complex(p_minus, 0.0);
    m += perp;
    return DensityOperator::from_matrix(std::move(m));
}

double gu_sequential_confidence(int n, std::span<const double> eta0s, int party) {
    if (n < 2) throw ParamOutOfRange("gu confidence needs n >= 2");
    if (party < 1) throw ParamOutOfRange("party index starts at 1");
    if (static_cast<size_t>(party - 1) > eta0s.size())
        throw ParamOutOfRange("not enough eta0 values for party " + std::to_string(party));
    double prod = 1.0;
    for (int k = 0; k < party - 1; ++k) {
        const double e = eta0s[static_cast<size_t>(k)];
        if (!(e >= 0.0 && e <= 1.0)) throw ParamOutOfRange("eta0 values must lie in [0,1]");
        prod *= 0.5 * (1.0 + e);
    }
    return (1.0 + prod) / n;
}

double gu_bloch_length(std::span<const double> eta0s) {
    double prod = 1.0;
    for (double e : eta0s) {
        if (!(e >= 0.0 && e <= 1.0)) throw ParamOutOfRange("eta0 values must lie in [0,1]");
        prod *= 0.5 * (1.0 + e);
    }
    return prod;
}

PartyBound max_parties_gu(int n, double c_th, double eta0) {
    if (n < 2) throw ParamOutOfRange("gu bound needs n >= 2");
    if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw ParamOutOfRange("eta0 must lie in [0,1]");
    if (!(n * c_th > 1.0)) throw ParamOutOfRange("threshold must satisfy n C_th > 1");
    if (eta0 == 1.0) {
        const double inf = std::numeric_limits<double>::infinity();
        return PartyBound{inf, admissible_from_bound(inf)};
    }
    const double bound = 1.0 + std::log(n * c_th - 1.0) / std::log(0.5 * (1.0 + eta0));
    return PartyBound{bound, admissible_from_bound(bound)};
}

int iterate_parties_gu(int n, double c_th, double eta0, int cap) {
    if (n < 2) throw ParamOutOfRange("gu bound needs n >= 2");
    if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw ParamOutOfRange("eta0 must lie in [0,1]");
    if (!(n * c_th > 1.0)) throw ParamOutOfRange("threshold must satisfy n C_th > 1");
    int r = 0;
    double prod = 1.0;  // product through party j-1 in the confidence recursion
    for (int j = 1; j <= cap; ++j) {
        const double c_j = (1.0 + prod) / n;
        if (!(c_j > c_th)) break;
        r = j;
        prod *= 0.5 * (1.0 + eta0);
    }
    return r;
}

ConfidenceDrop confidence_drop_small_eps(const Povm& povm, const Ensemble& ens, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ParamOutOfRange("strength must lie in [0,1]");

    const double base = max_confidence_element(ens, 1).confidence;
    auto weakened_confidence = [&](double e) {
        const KrausChannel ch = weak_channel(weaken_povm(povm, e));
        const Ensemble next = propagate_ensemble(ch, ens);
        return max_confidence_element(next, 1).confidence;
    };

    const double at_eps = weakened_confidence(eps);
    if (eps == 0.0) return ConfidenceDrop{base, at_eps, 0.0};

    // least-squares slope through the origin of (C1 - C2)/C1 against eps
    constexpr int mesh = 8;
    double sxy = 0.0;
    double sxx = 0.0;
    for (int i = 1; i <= mesh; ++i) {
        const double e = eps * i / mesh;
        const double y = (base - weakened_confidence(e)) / base;
        sxy += e * y;
        sxx += e * e;
    }
    return ConfidenceDrop{base, at_eps, sxy / sxx};
}

}  // namespace seqmc
