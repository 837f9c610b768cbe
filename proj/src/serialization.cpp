#include "fibrephase/serialization.hpp"

#include "fibrephase/errors.hpp"

namespace fibrephase {

namespace {

nlohmann::json space_json(const FockSpace& space) {
  nlohmann::json j;
  j["num_modes"] = space.num_modes();
  j["n_max"] = space.n_max();
  j["basis"] = space.basis();
  return j;
}

FockSpace space_from_json(const nlohmann::json& j) {
  FockSpace space(j.at("num_modes").get<int>(), j.at("n_max").get<int>());
  if (j.contains("basis") && j.at("basis").get<std::vector<Occupation>>() != space.basis()) {
    throw ValidationError("serialized basis does not match the lexicographic enumeration");
  }
  return space;
}

Complex complex_from_json(const nlohmann::json& pair) {
  if (!pair.is_array() || pair.size() != 2) throw ValidationError("complex entries must be [re, im] pairs");
  return {pair[0].get<double>(), pair[1].get<double>()};
}

}  // namespace

nlohmann::json to_json(const OperatorMatrix& op) {
  auto j = space_json(op.space());
  auto entries = nlohmann::json::array();
  const Matrix& m = op.entries();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back({m(r, c).real(), m(r, c).imag()});
  }
  j["entries"] = std::move(entries);
  return j;
}

nlohmann::json to_json(const StateVector& state) {
  auto j = space_json(state.space());
  auto amps = nlohmann::json::array();
  for (const auto& a : state.amplitudes()) amps.push_back({a.real(), a.imag()});
  j["amplitudes"] = std::move(amps);
  return j;
}

OperatorMatrix operator_from_json(const nlohmann::json& j) {
  FockSpace space = space_from_json(j);
  const auto& entries = j.at("entries");
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  if (entries.size() != static_cast<std::size_t>(dim * dim)) throw ValidationError("operator entry count mismatch");
  Matrix m(dim, dim);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = complex_from_json(entries[k++]);
  }
  return {std::move(space), std::move(m)};
}

StateVector state_from_json(const nlohmann::json& j) {
  FockSpace space = space_from_json(j);
  const auto& amps = j.at("amplitudes");
  if (amps.size() != space.dimension()) throw ValidationError("state amplitude count mismatch");
  Vector v(static_cast<Eigen::Index>(space.dimension()));
  for (std::size_t k = 0; k < amps.size(); ++k) v(static_cast<Eigen::Index>(k)) = complex_from_json(amps[k]);
  return {std::move(space), std::move(v)};
}

}  // namespace fibrephase
