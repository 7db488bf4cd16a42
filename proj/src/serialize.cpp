#include "seqmc/serialize.hpp"

namespace seqmc {

using nlohmann::json;

json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw SchemaViolation("complex number must be a [re, im] pair");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

json to_json(const ComplexMatrix& m) {
    json entries = json::array();
    for (const Complex& e : m.entries()) entries.push_back(to_json(e));
    return json{{"dim", m.dim()}, {"entries", entries}};
}

ComplexMatrix matrix_from_json(const json& j) {
    int dim = j.at("dim").get<int>();
    Cvec entries;
    for (const json& e : j.at("entries")) entries.push_back(complex_from_json(e));
    return ComplexMatrix::from_entries(dim, std::move(entries));
}

json to_json(const PureState& s) {
    json amps = json::array();
    for (const Complex& a : s.amplitudes()) amps.push_back(to_json(a));
    return json{{"dim", s.dim()}, {"amplitudes", amps}};
}

PureState pure_state_from_json(const json& j) {
    Cvec amps;
    for (const json& e : j.at("amplitudes")) amps.push_back(complex_from_json(e));
    return PureState::from_amplitudes(std::move(amps));
}

json to_json(const DensityOperator& rho) { return json{{"matrix", to_json(rho.matrix())}}; }

DensityOperator density_from_json(const json& j) {
    return DensityOperator::from_matrix(matrix_from_json(j.at("matrix")));
}

json to_json(const Ensemble& ens) {
    json states = json::array();
    for (const DensityOperator& s : ens.states) states.push_back(to_json(s));
    return json{{"label", ens.label}, {"priors", ens.priors}, {"states", states}};
}

Ensemble ensemble_from_json(const json& j) {
    std::vector<double> priors = j.at("priors").get<std::vector<double>>();
    std::vector<DensityOperator> states;
    for (const json& s : j.at("states")) states.push_back(density_from_json(s));
    return Ensemble::create(std::move(priors), std::move(states),
                            j.value("label", std::string{}));
}

json to_json(const Povm& povm) {
    json elements = json::array();
    json views = json::array();
    for (int i = 0; i < povm.size(); ++i) {
        elements.push_back(to_json(povm.element(i)));
        const auto& view = povm.rank_one_view(i);
        if (view)
            views.push_back(json{{"weight", view->weight}, {"direction", to_json(view->direction)}});
        else
            views.push_back(nullptr);
    }
    return json{{"elements", elements}, {"rank_one_views", views}};
}

Povm povm_from_json(const json& j) {
    std::vector<ComplexMatrix> elements;
    for (const json& e : j.at("elements")) elements.push_back(matrix_from_json(e));
    std::vector<std::optional<RankOneView>> views;
    if (j.contains("rank_one_views")) {
        for (const json& v : j.at("rank_one_views")) {
            if (v.is_null())
                views.push_back(std::nullopt);
            else
                views.push_back(RankOneView{v.at("weight").get<double>(),
                                            pure_state_from_json(v.at("direction"))});
        }
    }
    return Povm::from_elements(std::move(elements), std::move(views));
}

json to_json(const KrausChannel& ch) {
    json ops = json::array();
    for (int i = 0; i < ch.size(); ++i) ops.push_back(to_json(ch.op(i)));
    return json{{"operators", ops}};
}

KrausChannel channel_from_json(const json& j) {
    std::vector<ComplexMatrix> ops;
    for (const json& e : j.at("operators")) ops.push_back(matrix_from_json(e));
    return KrausChannel::from_operators(std::move(ops));
}

}  // namespace seqmc
