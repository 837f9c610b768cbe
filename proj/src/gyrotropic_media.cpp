#include "fibrephase/gyrotropic_media.hpp"

#include <cmath>

#include "fibrephase/errors.hpp"

namespace fibrephase {

namespace {

DispersionVerdict verdict(Handedness h, double n_squared, double omega) {
  DispersionVerdict v;
  v.handedness = h;
  v.n_squared = n_squared;
  if (n_squared > 0.0) {
    v.status = PropagationStatus::propagating;
    v.propagation_constant = std::sqrt(n_squared) * omega;
  } else {
    v.status = PropagationStatus::evanescent;
    v.propagation_constant = std::sqrt(-n_squared) * omega;
  }
  return v;
}

}  // namespace

Eigen::Matrix3cd GyrotropicMedium::permittivity() const {
  const std::complex<double> i(0.0, 1.0);
  Eigen::Matrix3cd eps = Eigen::Matrix3cd::Zero();
  eps(0, 0) = epsilon1;
  eps(0, 1) = i * epsilon2;
  eps(1, 0) = -i * epsilon2;
  eps(1, 1) = epsilon1;
  eps(2, 2) = epsilon3;
  return eps;
}

std::string to_string(Handedness h) { return h == Handedness::plus ? "plus" : "minus"; }

std::string to_string(PropagationStatus s) {
  return s == PropagationStatus::propagating ? "propagating" : "evanescent";
}

std::pair<double, double> refractive_indices(const GyrotropicMedium& medium) {
  if (!std::isfinite(medium.epsilon1) || !std::isfinite(medium.epsilon2) || !std::isfinite(medium.epsilon3) ||
      !std::isfinite(medium.mu)) {
    throw ValidationError("medium parameters must be finite");
  }
  return {medium.mu * (medium.epsilon1 + medium.epsilon2), medium.mu * (medium.epsilon1 - medium.epsilon2)};
}

std::pair<DispersionVerdict, DispersionVerdict> classify(const GyrotropicMedium& medium, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega must be positive");
  const auto [n_plus_sq, n_minus_sq] = refractive_indices(medium);
  return {verdict(Handedness::plus, n_plus_sq, omega), verdict(Handedness::minus, n_minus_sq, omega)};
}

std::pair<std::complex<double>, std::complex<double>> circular_combination_check(std::complex<double> e1,
                                                                                 std::complex<double> e2) {
  const std::complex<double> i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  return {(e1 + i * e2) * r, (e1 - i * e2) * r};
}

std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>> circular_combination_check(
    std::span<const std::complex<double>> e1, std::span<const std::complex<double>> e2) {
  if (e1.size() != e2.size()) throw ValidationError("field sample counts differ");
  std::vector<std::complex<double>> plus(e1.size());
  std::vector<std::complex<double>> minus(e1.size());
  for (std::size_t k = 0; k < e1.size(); ++k) {
    std::tie(plus[k], minus[k]) = circular_combination_check(e1[k], e2[k]);
  }
  return {std::move(plus), std::move(minus)};
}

}  // namespace fibrephase
