#pragma once

#include <json.hpp>

#include "seqmc/channels.hpp"

namespace seqmc {

// JSON wire format used by the CLI: complex numbers as [re, im] pairs,
// matrices as row-major entry arrays.

nlohmann::json to_json(const Complex& z);
Complex complex_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PureState& s);
PureState pure_state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DensityOperator& rho);
DensityOperator density_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Ensemble& ens);
Ensemble ensemble_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Povm& povm);
Povm povm_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const nlohmann::json& j);

}  // namespace seqmc
