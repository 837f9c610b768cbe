#pragma once

#include <nlohmann/json.hpp>

#include "fibrephase/fock_algebra.hpp"

namespace fibrephase {

// JSON layout shared by operators and states:
//   {"num_modes": m, "n_max": n, "basis": [[n1, ..., nm], ...],
//    "entries": [[re, im], ...]}            (operators, row-major)
//    "amplitudes": [[re, im], ...]          (states)

nlohmann::json to_json(const OperatorMatrix& op);
nlohmann::json to_json(const StateVector& state);

OperatorMatrix operator_from_json(const nlohmann::json& j);
StateVector state_from_json(const nlohmann::json& j);

}  // namespace fibrephase
