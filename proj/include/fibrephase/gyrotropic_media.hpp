#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fibrephase {

/// Homogeneous gyroelectric medium with permittivity tensor
///   [[e1, i e2, 0], [-i e2, e1, 0], [0, 0, e3]]
/// and scalar permeability mu. Only e1, e2, mu enter axial propagation.
struct GyrotropicMedium {
  double epsilon1 = 1.0;
  double epsilon2 = 0.0;
  double epsilon3 = 1.0;
  double mu = 1.0;

  /// Relative permittivity tensor.
  Eigen::Matrix3cd permittivity() const;
};

enum class Handedness { plus, minus };
enum class PropagationStatus { propagating, evanescent };

std::string to_string(Handedness h);
std::string to_string(PropagationStatus s);

/// Verdict for one circular branch. For a propagating branch
/// `propagation_constant` is the real wave number sqrt(n^2) omega/c; for an
/// evanescent one it is the decay constant sqrt(-n^2) omega/c (c = 1).
struct DispersionVerdict {
  Handedness handedness = Handedness::plus;
  double n_squared = 0.0;
  PropagationStatus status = PropagationStatus::evanescent;
  double propagation_constant = 0.0;
};

/// n_{+/-}^2 = mu (e1 +/- e2).
std::pair<double, double> refractive_indices(const GyrotropicMedium& medium);

/// Classifies both branches at angular frequency omega (> 0). n^2 = 0 counts
/// as evanescent with zero decay.
std::pair<DispersionVerdict, DispersionVerdict> classify(const GyrotropicMedium& medium, double omega);

/// Circular field combinations ((E1 + i E2)/sqrt2, (E1 - i E2)/sqrt2).
///
/// The plus combination carries {a_L, a_R^dag} operator content and
/// propagates with n_+; the minus combination carries {a_R, a_L^dag} and
/// propagates with n_-.
std::pair<std::complex<double>, std::complex<double>> circular_combination_check(std::complex<double> e1,
                                                                                 std::complex<double> e2);

/// Element-wise version over paired samples.
std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>> circular_combination_check(
    std::span<const std::complex<double>> e1, std::span<const std::complex<double>> e2);

}  // namespace fibrephase
