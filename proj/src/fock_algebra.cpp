#include "fibrephase/fock_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fibrephase/errors.hpp"

namespace fibrephase {

namespace {

void require_same_space(const FockSpace& a, const FockSpace& b) {
  if (!(a == b)) {
    throw ValidationError("operator/state spaces differ");
  }
}

OperatorMatrix bilinear_antisym(const FockSpace& space, int j, int k) {
  // -i (b_j^dag b_k - b_k^dag b_j)
  const auto bj = annihilation(space, j);
  const auto bk = annihilation(space, k);
  return Complex(0.0, -1.0) * (bj.adjoint() * bk - bk.adjoint() * bj);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

FockSpace::FockSpace(int num_modes, int n_max) {
  if (num_modes != 2 && num_modes != 3) {
    throw ValidationError("num_modes must be 2 or 3, got " + std::to_string(num_modes));
  }
  if (n_max < 1) {
    throw ValidationError("n_max must be >= 1, got " + std::to_string(n_max));
  }
  auto data = std::make_shared<Data>();
  data->num_modes = num_modes;
  data->n_max = n_max;
  std::size_t dim = 1;
  for (int m = 0; m < num_modes; ++m) dim *= static_cast<std::size_t>(n_max + 1);
  data->basis.reserve(dim);
  Occupation occ(static_cast<std::size_t>(num_modes), 0);
  for (std::size_t s = 0; s < dim; ++s) {
    data->basis.push_back(occ);
    // odometer increment, last mode fastest
    for (int m = num_modes - 1; m >= 0; --m) {
      if (++occ[static_cast<std::size_t>(m)] <= n_max) break;
      occ[static_cast<std::size_t>(m)] = 0;
    }
  }
  data_ = std::move(data);
}

std::size_t FockSpace::index_of(std::span<const int> occupation) const {
  if (static_cast<int>(occupation.size()) != num_modes()) {
    throw ValidationError("occupation tuple has wrong number of modes");
  }
  std::size_t index = 0;
  for (int n : occupation) {
    if (n < 0 || n > n_max()) {
      throw ValidationError("occupation " + std::to_string(n) + " outside [0, " +
                            std::to_string(n_max()) + "]");
    }
    index = index * static_cast<std::size_t>(n_max() + 1) + static_cast<std::size_t>(n);
  }
  return index;
}

std::vector<std::size_t> FockSpace::bounded_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < dimension(); ++s) {
    const auto& occ = data_->basis[s];
    if (std::all_of(occ.begin(), occ.end(), [&](int n) { return n <= n_max() - 1; })) {
      out.push_back(s);
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> FockSpace::number_sectors(int max_photons) const {
  std::vector<std::vector<std::size_t>> sectors(static_cast<std::size_t>(std::max(max_photons, -1) + 1));
  for (std::size_t s = 0; s < dimension(); ++s) {
    const auto& occ = data_->basis[s];
    const int total = std::accumulate(occ.begin(), occ.end(), 0);
    if (total <= max_photons) sectors[static_cast<std::size_t>(total)].push_back(s);
  }
  return sectors;
}

std::vector<std::size_t> FockSpace::physical_indices() const {
  std::vector<std::size_t> out;
  for (const auto& sector : number_sectors(n_max())) out.insert(out.end(), sector.begin(), sector.end());
  std::sort(out.begin(), out.end());
  return out;
}

FockSpace build_space(int num_modes, int n_max) { return FockSpace(num_modes, n_max); }

// ---------------------------------------------------------------------------

OperatorMatrix::OperatorMatrix(FockSpace space, Matrix entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  const auto dim = static_cast<Eigen::Index>(space_.dimension());
  if (entries_.rows() != dim || entries_.cols() != dim) {
    throw ValidationError("operator matrix shape does not match space dimension");
  }
}

OperatorMatrix OperatorMatrix::zero(const FockSpace& space) {
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  return {space, Matrix::Zero(dim, dim)};
}

OperatorMatrix OperatorMatrix::identity(const FockSpace& space) {
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  return {space, Matrix::Identity(dim, dim)};
}

OperatorMatrix OperatorMatrix::adjoint() const { return {space_, entries_.adjoint()}; }

bool OperatorMatrix::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double OperatorMatrix::max_norm() const {
  return entries_.size() == 0 ? 0.0 : entries_.cwiseAbs().maxCoeff();
}

Matrix OperatorMatrix::compressed(std::span<const std::size_t> indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Matrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out(r, c) = entries_(static_cast<Eigen::Index>(indices[static_cast<std::size_t>(r)]),
                           static_cast<Eigen::Index>(indices[static_cast<std::size_t>(c)]));
    }
  }
  return out;
}

StateVector OperatorMatrix::apply(const StateVector& state) const {
  require_same_space(space_, state.space());
  return {space_, entries_ * state.amplitudes()};
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& rhs) {
  require_same_space(space_, rhs.space_);
  entries_ += rhs.entries_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& rhs) {
  require_same_space(space_, rhs.space_);
  entries_ -= rhs.entries_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(Complex scale) {
  entries_ *= scale;
  return *this;
}

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  require_same_space(lhs.space_, rhs.space_);
  return {lhs.space_, lhs.entries_ * rhs.entries_};
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) { return a * b - b * a; }

double restricted_max_norm(const Matrix& m, std::span<const std::size_t> indices) {
  double worst = 0.0;
  for (auto r : indices) {
    for (auto c : indices) {
      worst = std::max(worst, std::abs(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

StateVector::StateVector(FockSpace space, Vector amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != static_cast<Eigen::Index>(space_.dimension())) {
    throw ValidationError("state length does not match space dimension");
  }
  if (!amplitudes_.allFinite()) throw ValidationError("state amplitudes must be finite");
}

StateVector StateVector::basis_state(const FockSpace& space, std::span<const int> occupation) {
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
  amps(static_cast<Eigen::Index>(space.index_of(occupation))) = 1.0;
  return {space, std::move(amps)};
}

bool StateVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ValidationError("cannot normalize the zero vector");
  return {space_, amplitudes_ / n};
}

Complex StateVector::inner(const StateVector& other) const {
  require_same_space(space_, other.space_);
  return amplitudes_.dot(other.amplitudes_);  // conjugates the left argument
}

Complex StateVector::expectation(const OperatorMatrix& op) const {
  require_same_space(space_, op.space());
  return amplitudes_.dot(op.entries() * amplitudes_);
}

// ---------------------------------------------------------------------------

OperatorMatrix annihilation(const FockSpace& space, int mode) {
  if (mode < 0 || mode >= space.num_modes()) {
    throw ValidationError("mode " + std::to_string(mode) + " out of range");
  }
  auto op = OperatorMatrix::zero(space);
  Matrix entries = op.entries();
  const auto m = static_cast<std::size_t>(mode);
  for (std::size_t s = 0; s < space.dimension(); ++s) {
    Occupation occ = space.occupation(s);
    const int n = occ[m];
    if (n == 0) continue;
    occ[m] = n - 1;
    entries(static_cast<Eigen::Index>(space.index_of(occ)), static_cast<Eigen::Index>(s)) =
        std::sqrt(static_cast<double>(n));
  }
  return {space, std::move(entries)};
}

OperatorMatrix creation(const FockSpace& space, int mode) { return annihilation(space, mode).adjoint(); }

CircularOperators circular_operators(const FockSpace& space) {
  if (space.num_modes() == 2) {
    auto a_r = annihilation(space, 0);
    auto a_l = annihilation(space, 1);
    auto a_r_dag = a_r.adjoint();
    auto a_l_dag = a_l.adjoint();
    return {std::move(a_r), std::move(a_r_dag), std::move(a_l), std::move(a_l_dag)};
  }
  const auto b1 = annihilation(space, 0);
  const auto b2 = annihilation(space, 1);
  const Complex i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  auto a_r = (b1 - i * b2) * r;
  auto a_l = (b1 + i * b2) * r;
  auto a_r_dag = a_r.adjoint();
  auto a_l_dag = a_l.adjoint();
  return {std::move(a_r), std::move(a_r_dag), std::move(a_l), std::move(a_l_dag)};
}

const OperatorMatrix& SpinComponents::operator[](int axis) const {
  switch (axis) {
    case 0: return s1;
    case 1: return s2;
    case 2: return s3;
    default: throw ValidationError("spin axis out of range");
  }
}

OperatorMatrix SpinComponents::dot(const Vec3& v) const {
  const Matrix m = v.x() * s1.entries() + v.y() * s2.entries() + v.z() * s3.entries();
  return {s1.space(), m};
}

SpinComponents spin_fixed(const FockSpace& space) {
  if (space.num_modes() != 3) {
    throw ValidationError("fixed-frame spin needs a 3-mode space");
  }
  return {bilinear_antisym(space, 1, 2), bilinear_antisym(space, 2, 0), bilinear_antisym(space, 0, 1)};
}

OperatorMatrix helicity_operator(const SpinComponents& spin, const Vec3& k_hat) {
  require_unit(k_hat, 1e-12, "helicity direction");
  return spin.dot(k_hat);
}

OperatorMatrix helicity_operator(const FockSpace& space, const Vec3& k_hat) {
  return helicity_operator(spin_fixed(space), k_hat);
}

S3Split s3_split(const FockSpace& space) {
  const auto ops = circular_operators(space);
  auto right_normal = ops.a_r_dag * ops.a_r;
  auto left_normal = Complex(-1.0) * (ops.a_l_dag * ops.a_l);
  auto right_nonnormal = (ops.a_r * ops.a_r_dag + ops.a_r_dag * ops.a_r) * 0.5;
  auto left_nonnormal = (ops.a_l * ops.a_l_dag + ops.a_l_dag * ops.a_l) * -0.5;
  return {std::move(right_nonnormal), std::move(left_nonnormal), std::move(right_normal),
          std::move(left_normal)};
}

std::string to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::normal: return "normal";
    case Ordering::nonnormal_r: return "nonnormal_R";
    case Ordering::nonnormal_l: return "nonnormal_L";
    case Ordering::nonnormal_total: return "nonnormal_total";
  }
  return "normal";
}

Ordering parse_ordering(const std::string& text) {
  if (text == "normal") return Ordering::normal;
  if (text == "nonnormal_R") return Ordering::nonnormal_r;
  if (text == "nonnormal_L") return Ordering::nonnormal_l;
  if (text == "nonnormal_total") return Ordering::nonnormal_total;
  throw ValidationError("unknown ordering '" + text +
                        "' (expected normal, nonnormal_R, nonnormal_L, nonnormal_total)");
}

OperatorMatrix s3_for(const S3Split& split, Ordering ordering) {
  switch (ordering) {
    case Ordering::normal: return split.right_normal + split.left_normal;
    case Ordering::nonnormal_r: return split.right_nonnormal;
    case Ordering::nonnormal_l: return split.left_nonnormal;
    case Ordering::nonnormal_total: return split.right_nonnormal + split.left_nonnormal;
  }
  return split.right_normal + split.left_normal;
}

void require_unit(const Vec3& v, double tol, const char* what) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > tol) {
    throw ValidationError(std::string(what) + " must be a unit vector");
  }
}

PolarizationTriad polarization_triad(const Vec3& k_hat) {
  require_unit(k_hat, 1e-12, "polarization triad direction");
  const double rho = std::hypot(k_hat.x(), k_hat.y());
  const double lambda = std::atan2(rho, k_hat.z());
  const double gamma = rho > 0.0 ? std::atan2(k_hat.y(), k_hat.x()) : 0.0;
  // rotation by lambda about (-sin gamma, cos gamma, 0)
  const Eigen::Matrix3d rot = (Eigen::AngleAxisd(gamma, Vec3::UnitZ()) * Eigen::AngleAxisd(lambda, Vec3::UnitY()) *
                               Eigen::AngleAxisd(-gamma, Vec3::UnitZ()))
                                  .toRotationMatrix();
  return {rot * Vec3::UnitX(), rot * Vec3::UnitY()};
}

StateVector build_photon_state(const FockSpace& space, int n_R, int n_L) {
  if (n_R < 0 || n_L < 0) throw ValidationError("photon numbers must be non-negative");
  const bool fits = space.num_modes() == 3 ? n_R + n_L <= space.n_max()
                                           : n_R <= space.n_max() && n_L <= space.n_max();
  if (!fits) {
    throw ValidationError("photon state (n_R=" + std::to_string(n_R) + ", n_L=" + std::to_string(n_L) +
                          ") overflows cutoff n_max=" + std::to_string(space.n_max()));
  }
  const auto ops = circular_operators(space);
  const Occupation vac(static_cast<std::size_t>(space.num_modes()), 0);
  Vector psi = StateVector::basis_state(space, vac).amplitudes();
  for (int i = 0; i < n_R; ++i) psi = ops.a_r_dag.entries() * psi;
  for (int i = 0; i < n_L; ++i) psi = ops.a_l_dag.entries() * psi;
  psi /= std::sqrt(factorial(n_R) * factorial(n_L));
  return {space, std::move(psi)};
}

StateVector helicity_state(const FockSpace& space, const Vec3& k_hat, int sigma) {
  if (space.num_modes() != 3) throw ValidationError("helicity states need a 3-mode space");
  if (sigma != 1 && sigma != -1) throw ValidationError("helicity sigma must be +1 or -1");
  const auto triad = polarization_triad(k_hat);
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
  const double r = 1.0 / std::sqrt(2.0);
  for (int m = 0; m < 3; ++m) {
    Occupation occ(3, 0);
    occ[static_cast<std::size_t>(m)] = 1;
    psi(static_cast<Eigen::Index>(space.index_of(occ))) =
        Complex(triad.e1[m], sigma * triad.e2[m]) * r;
  }
  return {space, std::move(psi)};
}

}  // namespace fibrephase
