#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fibrephase {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Vec3 = Eigen::Vector3d;

/// Occupation tuple (n_1, ..., n_m) of one basis state.
using Occupation = std::vector<int>;

/// Truncated multimode bosonic Fock space.
///
/// Every mode is capped at `n_max` photons, so the dimension is
/// (n_max + 1)^num_modes. Basis states are enumerated lexicographically in
/// (n_1, ..., n_m) with the last mode running fastest. Copies share the
/// immutable basis table.
class FockSpace {
 public:
  FockSpace(int num_modes, int n_max);

  int num_modes() const { return data_->num_modes; }
  int n_max() const { return data_->n_max; }
  std::size_t dimension() const { return data_->basis.size(); }
  const std::vector<Occupation>& basis() const { return data_->basis; }
  const Occupation& occupation(std::size_t index) const { return data_->basis.at(index); }

  /// Index of an occupation tuple; throws ValidationError when it is not representable.
  std::size_t index_of(std::span<const int> occupation) const;

  /// States whose every occupation is at most n_max - 1. On this block,
  /// products of two ladder or bilinear operators are free of truncation error.
  std::vector<std::size_t> bounded_indices() const;

  /// States grouped by total photon number N = 0..max_photons. Number-conserving
  /// operators are block diagonal over these sectors and exact for N <= n_max.
  std::vector<std::vector<std::size_t>> number_sectors(int max_photons) const;

  /// Union of number_sectors(n_max): the physical sector where the spin algebra is exact.
  std::vector<std::size_t> physical_indices() const;

  bool operator==(const FockSpace& other) const {
    return num_modes() == other.num_modes() && n_max() == other.n_max();
  }

 private:
  struct Data {
    int num_modes;
    int n_max;
    std::vector<Occupation> basis;
  };
  std::shared_ptr<const Data> data_;
};

FockSpace build_space(int num_modes, int n_max);

class StateVector;

/// Dense complex matrix of a second-quantized operator on a FockSpace (hbar = 1).
class OperatorMatrix {
 public:
  OperatorMatrix(FockSpace space, Matrix entries);

  static OperatorMatrix zero(const FockSpace& space);
  static OperatorMatrix identity(const FockSpace& space);

  const FockSpace& space() const { return space_; }
  const Matrix& entries() const { return entries_; }
  std::size_t dimension() const { return space_.dimension(); }

  OperatorMatrix adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  double max_norm() const;

  /// Principal submatrix on the given basis indices.
  Matrix compressed(std::span<const std::size_t> indices) const;

  StateVector apply(const StateVector& state) const;

  OperatorMatrix& operator+=(const OperatorMatrix& rhs);
  OperatorMatrix& operator-=(const OperatorMatrix& rhs);
  OperatorMatrix& operator*=(Complex scale);

  friend OperatorMatrix operator+(OperatorMatrix lhs, const OperatorMatrix& rhs) { return lhs += rhs; }
  friend OperatorMatrix operator-(OperatorMatrix lhs, const OperatorMatrix& rhs) { return lhs -= rhs; }
  friend OperatorMatrix operator*(OperatorMatrix lhs, Complex scale) { return lhs *= scale; }
  friend OperatorMatrix operator*(Complex scale, OperatorMatrix rhs) { return rhs *= scale; }
  friend OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs);

 private:
  FockSpace space_;
  Matrix entries_;
};

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// Max-norm of a matrix restricted to the given basis indices.
double restricted_max_norm(const Matrix& m, std::span<const std::size_t> indices);

/// Complex amplitude vector over a FockSpace basis.
class StateVector {
 public:
  StateVector(FockSpace space, Vector amplitudes);

  static StateVector basis_state(const FockSpace& space, std::span<const int> occupation);

  const FockSpace& space() const { return space_; }
  const Vector& amplitudes() const { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }
  bool is_normalized(double tol = 1e-12) const;
  StateVector normalized() const;

  /// <this|other>
  Complex inner(const StateVector& other) const;
  /// <this|op|this> (real part for Hermitian op).
  Complex expectation(const OperatorMatrix& op) const;

 private:
  FockSpace space_;
  Vector amplitudes_;
};

OperatorMatrix annihilation(const FockSpace& space, int mode);
OperatorMatrix creation(const FockSpace& space, int mode);

/// Right/left circular ladder operators.
///
/// In a 3-mode space: a_R^dag = (b_1^dag + i b_2^dag)/sqrt2 and
/// a_L^dag = (b_1^dag - i b_2^dag)/sqrt2, with mode 3 untouched.
/// In a 2-mode space, mode 0 is R and mode 1 is L directly.
struct CircularOperators {
  OperatorMatrix a_r;
  OperatorMatrix a_r_dag;
  OperatorMatrix a_l;
  OperatorMatrix a_l_dag;
};

CircularOperators circular_operators(const FockSpace& space);

/// Fixed-frame photon spin S_fix built from the Cartesian mode operators:
///   S_1 = -i(b_2^dag b_3 - b_3^dag b_2), cyclic.
struct SpinComponents {
  OperatorMatrix s1;
  OperatorMatrix s2;
  OperatorMatrix s3;

  const OperatorMatrix& operator[](int axis) const;
  /// Sum_a v_a S_a.
  OperatorMatrix dot(const Vec3& v) const;
};

SpinComponents spin_fixed(const FockSpace& space);

/// Helicity I = k_hat . S for a unit k_hat.
OperatorMatrix helicity_operator(const SpinComponents& spin, const Vec3& k_hat);
OperatorMatrix helicity_operator(const FockSpace& space, const Vec3& k_hat);

/// Per-handedness third spin component in both orderings.
///
/// Non-normal pieces keep the zero-point term:
///   S3_R = (a_R a_R^dag + a_R^dag a_R)/2,  S3_L = -(a_L a_L^dag + a_L^dag a_L)/2.
/// Normal pieces are a_R^dag a_R and -a_L^dag a_L.
struct S3Split {
  OperatorMatrix right_nonnormal;
  OperatorMatrix left_nonnormal;
  OperatorMatrix right_normal;
  OperatorMatrix left_normal;
};

S3Split s3_split(const FockSpace& space);

/// Which S3 variant feeds phase expectations.
enum class Ordering { normal, nonnormal_r, nonnormal_l, nonnormal_total };

std::string to_string(Ordering ordering);
Ordering parse_ordering(const std::string& text);

/// S3 operator selected by an ordering flag. `normal` is the total normal-order S3.
OperatorMatrix s3_for(const S3Split& split, Ordering ordering);

/// Real transverse polarization pair (e1, e2) with e1 x e2 = k_hat.
///
/// Gauge: e1 = x, e2 = y at k_hat = z; elsewhere the pair is carried by the
/// rotation through angle lambda about (-sin gamma, cos gamma, 0).
struct PolarizationTriad {
  Vec3 e1;
  Vec3 e2;
};

PolarizationTriad polarization_triad(const Vec3& k_hat);

/// |n_R, n_L> = (a_R^dag)^n_R (a_L^dag)^n_L |0> / sqrt(n_R! n_L!).
StateVector build_photon_state(const FockSpace& space, int n_R, int n_L);

/// One-photon helicity eigenstate along k_hat: (e1 + i sigma e2).b^dag |0> / sqrt2.
StateVector helicity_state(const FockSpace& space, const Vec3& k_hat, int sigma);

/// Throws ValidationError unless |norm(v) - 1| <= tol.
void require_unit(const Vec3& v, double tol, const char* what);

}  // namespace fibrephase
