#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "fibrephase/errors.hpp"
#include "fibrephase/numerics.hpp"
#include "fibrephase/phase_engine.hpp"

using namespace fibrephase;

namespace {

// 2 pi (1 - cos(pi/4)) to 20 digits.
constexpr double kSolidAngle45 = 1.8403023690212202299;

TangentTrajectory helix(double tilt, double turns, int steps) {
  return tangent_trajectory(make_tilted_helix(tilt, turns, 2 * steps + 1), false);
}

// exp(-i H) for Hermitian H via eigendecomposition.
Matrix unitary_by_eigen(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXcd phases = (-Complex(0.0, 1.0) * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

struct Run {
  EvolutionResult evolution;
  PhaseSeries series;
};

Run run(const StateVector& psi0, const TangentTrajectory& traj, const SpinComponents& spin) {
  auto evolution = evolve_state(psi0, traj, spin);
  auto series = extract_phases(evolution, traj, spin);
  return {std::move(evolution), std::move(series)};
}

// Random smooth closed-ish tangent curve with analytic rate.
TangentTrajectory wobbly(int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.2, 1.2);
  const double a = u(rng), b = u(rng), c = u(rng);
  std::vector<double> t;
  std::vector<Vec3> k;
  std::vector<Vec3> kd;
  for (int i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / (samples - 1);
    const Vec3 v(std::cos(2 * M_PI * s) + a * s, std::sin(2 * M_PI * s) * b, 1.0 + c * std::sin(M_PI * s));
    const Vec3 vd(-2 * M_PI * std::sin(2 * M_PI * s) + a, 2 * M_PI * b * std::cos(2 * M_PI * s),
                  M_PI * c * std::cos(M_PI * s));
    const double n = v.norm();
    t.push_back(s);
    k.push_back(v / n);
    kd.push_back(vd / n - v * v.dot(vd) / (n * n * n));
  }
  TangentTrajectory traj;
  traj.times = t;
  traj.tangents = k;
  traj.derivatives = kd;
  return traj;
}

}  // namespace

TEST_CASE("matrix exponential agrees with eigendecomposition") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 8;
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
    const double scale = 0.1 + 3.0 * (trial % 5);
    const Matrix h = scale * (a + a.adjoint()) / 2.0;
    const Matrix expm = matrix_exponential(-Complex(0.0, 1.0) * h);
    CHECK((expm - unitary_by_eigen(h)).cwiseAbs().maxCoeff() < 1e-11);
  }
  CHECK((matrix_exponential(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("V is unitary and maps helicity to S3") {
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> lam(0.0, M_PI);
  std::uniform_real_distribution<double> gam(-M_PI, M_PI);
  const FockSpace space(3, 2);
  const auto spin = spin_fixed(space);
  const Matrix id = Matrix::Identity(space.dimension(), space.dimension());
  const auto physical = space.physical_indices();
  for (int trial = 0; trial < 50; ++trial) {
    const double l = lam(rng);
    const double g = gam(rng);
    const auto v = evolution_operator_v(l, g, spin);
    CHECK((v.adjoint() * v).entries().isApprox(id, 1e-10));
    const Vec3 k(std::sin(l) * std::cos(g), std::sin(l) * std::sin(g), std::cos(l));
    const auto iv = v.adjoint() * helicity_operator(spin, k) * v;
    CHECK(restricted_max_norm((iv - spin.s3).entries(), physical) < 1e-9);
    // Same rotation written as exp(-i lambda n.S).
    const Vec3 axis(-std::sin(g), std::cos(g), 0.0);
    const Matrix oracle = unitary_by_eigen(l * spin.dot(axis).entries());
    CHECK((v.entries() - oracle).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK((evolution_operator_v(0.0, 1.3, space).entries() - id).cwiseAbs().maxCoeff() == 0.0);
  const auto v = evolution_operator_v(M_PI / 4, 0.0, space);
  const auto iv = v.adjoint() * helicity_operator(space, Vec3(std::sin(M_PI / 4), 0, std::cos(M_PI / 4))) * v;
  CHECK(restricted_max_norm((iv - spin.s3).entries(), physical) < 1e-9);
}

TEST_CASE("anholonomy integral on constant-tilt helices") {
  CHECK(anholonomy_integral(spherical_angles(helix(0.0, 1.0, 256)), 1.0) == 0.0);
  CHECK(std::abs(anholonomy_integral(spherical_angles(helix(M_PI / 2, 1.0, 256)), 1.0) - 2 * M_PI) < 1e-12);
  const auto angles = spherical_angles(helix(M_PI / 4, 1.0, 2048));
  CHECK(std::abs(anholonomy_integral(angles, 1.0) - kSolidAngle45) < 1e-10);
  CHECK(std::abs(anholonomy_integral(angles, 0.5) - kSolidAngle45 / 2) < 1e-10);
  CHECK(std::abs(anholonomy_integral(angles, 0.3001) - kSolidAngle45 * 0.3001) < 1e-10);
  CHECK_THROWS_AS(anholonomy_integral(angles, 1.5), ValidationError);
  CHECK_THROWS_AS(anholonomy_integral(angles, -0.1), ValidationError);
  const auto cumulative = cumulative_anholonomy(angles);
  CHECK(cumulative.size() == angles.size());
  CHECK(std::abs(cumulative.back() - kSolidAngle45) < 1e-10);
}

TEST_CASE("Berry limit: non-cyclic closed form at one period equals the cyclic value") {
  for (double tilt : {0.2, M_PI / 6, M_PI / 4, M_PI / 3, 1.4}) {
    const auto angles = spherical_angles(helix(tilt, 1.0, 1024));
    for (double s3 : {1.0, -1.0, 2.0, 0.5}) {
      CHECK(std::abs(closed_form_phase(angles, s3, 1.0) - berry_phase_cyclic(tilt, s3)) < 1e-10);
    }
  }
}

TEST_CASE("closed-form specializations") {
  const auto angles = spherical_angles(helix(M_PI / 3, 1.0, 1024));
  CHECK(std::abs(closed_form_phase(angles, 0.5, 1.0) - M_PI / 2) < 1e-10);
  CHECK(std::abs(closed_form_phase(angles, -0.5, 1.0) + M_PI / 2) < 1e-10);
  CHECK(closed_form_phase(angles, 0.5, 1.0) + closed_form_phase(angles, -0.5, 1.0) == 0.0);
  CHECK(std::abs(closed_form_phase(angles, 2 - 1, 1.0) - M_PI) < 1e-10);
}

TEST_CASE("cyclic Berry phase") {
  CHECK(berry_phase_cyclic(0.0, 1.0) == 0.0);
  CHECK(berry_phase_cyclic(M_PI / 2, 1.0) == doctest::Approx(2 * M_PI).epsilon(1e-15));
  CHECK(std::abs(berry_phase_cyclic(M_PI / 4, -1.0) + kSolidAngle45) < 1e-15);
  CHECK_THROWS_AS(berry_phase_cyclic(-0.1, 1.0), ValidationError);
  CHECK_THROWS_AS(berry_phase_cyclic(3.2, 1.0), ValidationError);
}

TEST_CASE("effective Hamiltonian") {
  const FockSpace space(3, 1);
  const auto spin = spin_fixed(space);

  const auto straight = helix(0.0, 1.0, 64);
  for (std::size_t i = 0; i < straight.size(); ++i) CHECK(effective_hamiltonian(straight, spin, i).max_norm() == 0.0);

  // Equator circle at angular rate Omega: (k x k_dot)/k^2 = Omega z.
  const auto circle = helix(M_PI / 2, 1.0, 64);
  const double omega = 2 * M_PI;
  for (std::size_t i = 0; i < circle.size(); i += 7) {
    const auto h = effective_hamiltonian(circle, spin, i);
    CHECK(h.is_hermitian(1e-14));
    CHECK((h - omega * spin.s3).max_norm() < 1e-12);
  }

  const auto traj = wobbly(257, 4);
  const auto scaled = traj.scaled(5.0);
  for (std::size_t i = 0; i < traj.size(); i += 16) {
    CHECK((effective_hamiltonian(traj, spin, i) - effective_hamiltonian(scaled, spin, i)).max_norm() < 1e-12);
  }
  CHECK_NOTHROW(effective_hamiltonian(traj, spin, traj.times[3]));
  CHECK_THROWS_AS(effective_hamiltonian(traj, spin, 0.5 * (traj.times[3] + traj.times[4])), ValidationError);
}

TEST_CASE("Liouville-von Neumann residual") {
  const FockSpace space(3, 2);
  const auto spin = spin_fixed(space);
  const auto h = helix(M_PI / 4, 1.0, 2048);
  double worst = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) worst = std::max(worst, lvn_residual(h, spin, i));
  CHECK(worst < 1e-6);

  const auto straight = helix(0.0, 1.0, 64);
  for (std::size_t i = 0; i < straight.size(); ++i) CHECK(lvn_residual(straight, spin, i) == 0.0);

  // Random low-order Fourier curves, finite-difference rates.
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    std::array<double, 6> c{};
    for (auto& x : c) x = coef(rng);
    std::vector<double> t;
    std::vector<Vec3> k;
    for (int i = 0; i < 2049; ++i) {
      const double s = i / 2048.0;
      const Vec3 v(c[0] * std::sin(M_PI * s) + c[1] * s, c[2] * std::cos(M_PI * s) + c[3] * s * s,
                   1.0 + c[4] * std::sin(2 * M_PI * s) + c[5] * s);
      t.push_back(s);
      k.push_back(v.normalized());
    }
    const auto fd = make_trajectory(t, k);
    double w = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) w = std::max(w, lvn_residual(fd, spin, i));
    CHECK(w < 1e-5);
  }

  // Higher curvature: the residual is pure differencing error and falls at second order.
  double previous = 0.0;
  for (int samples : {513, 1025, 2049, 4097}) {
    const auto exact = wobbly(samples, 1);
    const auto fd = make_trajectory(exact.times, exact.tangents);
    double w = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) w = std::max(w, lvn_residual(fd, spin, i));
    if (previous > 0.0) CHECK(previous / w > 3.5);
    previous = w;
  }
}

TEST_CASE("free evolution leaves the state untouched") {
  const FockSpace space(3, 2);
  const auto spin = spin_fixed(space);
  const auto psi0 = build_photon_state(space, 1, 1);
  const auto r = run(psi0, helix(0.0, 1.0, 64), spin);
  for (const auto& s : r.evolution.states) CHECK((s.amplitudes() - psi0.amplitudes()).norm() == 0.0);
  CHECK(r.series.final.total_phase == 0.0);
  CHECK(r.series.final.dynamical_phase == 0.0);
  CHECK(r.series.final.geometric_phase == 0.0);
}

TEST_CASE("helicity eigenstates pick up plus and minus the solid angle") {
  const FockSpace space(3, 1);
  const auto spin = spin_fixed(space);
  const auto traj = helix(M_PI / 4, 1.0, 8192);
  const Vec3 k0 = traj.tangents.front();
  const auto plus = run(helicity_state(space, k0, +1), traj, spin);
  const auto minus = run(helicity_state(space, k0, -1), traj, spin);
  CHECK(plus.series.final.closed_form_valid);
  CHECK(std::abs(plus.series.final.geometric_phase - kSolidAngle45) < 1e-4);
  CHECK(std::abs(plus.series.final.closed_form_phase - kSolidAngle45) < 1e-8);
  CHECK(std::abs(minus.series.final.geometric_phase + kSolidAngle45) < 1e-4);
  CHECK(std::abs(plus.series.final.geometric_phase + minus.series.final.geometric_phase) < 1e-6);
  CHECK(std::abs(plus.series.overlap_magnitude.back() - 1.0) < 1e-5);
  CHECK(std::abs(plus.series.final.dynamical_phase) < 1e-9);
  CHECK(plus.series.final.geometric_phase ==
        doctest::Approx(plus.series.final.total_phase - plus.series.final.dynamical_phase));
}

TEST_CASE("non-cyclic phase follows the running closed form from an aligned start") {
  const FockSpace space(3, 1);
  const auto spin = spin_fixed(space);
  const auto traj = tangent_trajectory(make_tilted_helix(M_PI / 4, 1.0, 2 * 8192 + 1), true);
  const auto plus = run(helicity_state(space, Vec3::UnitZ(), +1), traj, spin);
  const auto cumulative = cumulative_anholonomy(spherical_angles(traj));
  for (std::size_t i = 0; i < plus.series.times.size(); i += 97) {
    const double expected = cumulative[plus.evolution.sample_indices[i]];
    CHECK(std::abs(numerics::wrap_angle(plus.series.geometric[i] - expected)) < 1e-4);
  }
  CHECK(std::abs(plus.series.final.geometric_phase - kSolidAngle45) < 1e-4);
}

TEST_CASE("unitarity over 10^4 steps") {
  const FockSpace space(3, 2);
  const auto spin = spin_fixed(space);
  const auto traj = helix(M_PI / 3, 1.0, 10000);
  const auto psi0 = evolution_operator_v(M_PI / 3, 0.0, spin).apply(build_photon_state(space, 1, 1));
  const auto evolution = evolve_state(psi0.normalized(), traj, spin);
  double drift = 0.0;
  for (double n : evolution.norms) drift = std::max(drift, std::abs(n - 1.0));
  CHECK(drift < 1e-9);
  CHECK(evolution.max_step_metric < 0.1);
}

TEST_CASE("RK4 phase error converges at fourth order") {
  const FockSpace space(3, 1);
  const auto spin = spin_fixed(space);
  std::vector<double> gaps;
  for (int steps : {128, 256, 512, 1024}) {
    const auto traj = helix(M_PI / 4, 1.0, steps);
    const auto r = run(helicity_state(space, traj.tangents.front(), 1), traj, spin);
    gaps.push_back(std::abs(r.series.final.geometric_phase - kSolidAngle45));
  }
  for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i - 1] / gaps[i] > 12.0);
}

TEST_CASE("phases are invariant under k scaling and reparametrization") {
  const FockSpace space(3, 1);
  const auto spin = spin_fixed(space);
  const auto traj = wobbly(4097, 9);
  const auto psi0 = helicity_state(space, traj.tangents.front(), 1);
  const auto a = run(psi0, traj, spin).series.final;
  const auto b = run(psi0, traj.scaled(1e3), spin).series.final;
  CHECK(std::abs(a.geometric_phase - b.geometric_phase) < 1e-10);
  CHECK(std::abs(a.closed_form_phase - b.closed_form_phase) < 1e-10);
  CHECK(std::abs(a.total_phase - b.total_phase) < 1e-10);

  // u(s) = s + 0.1 sin(2 pi s) / (2 pi) is a smooth monotone map of [0, 1].
  const auto base = helix(M_PI / 4, 1.0, 2048);
  TangentTrajectory warped;
  const int samples = 4097;
  for (int i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / (samples - 1);
    const double u = s + 0.1 * std::sin(2 * M_PI * s) / (2 * M_PI);
    const double du = 1.0 + 0.1 * std::cos(2 * M_PI * s);
    const double phi = 2 * M_PI * u;
    const double sl = std::sin(M_PI / 4);
    warped.times.push_back(s);
    warped.tangents.emplace_back(-sl * std::sin(phi), sl * std::cos(phi), std::cos(M_PI / 4));
    warped.derivatives.push_back(2 * M_PI * sl * du * Vec3(-std::cos(phi), -std::sin(phi), 0.0));
  }
  const double original = closed_form_phase(spherical_angles(base), 1.0, 1.0);
  const double resampled = closed_form_phase(spherical_angles(warped), 1.0, 1.0);
  CHECK(std::abs(original - resampled) < 1e-8);
}

TEST_CASE("non-eigenstates are flagged as outside the closed form") {
  const FockSpace space(3, 2);
  const auto spin = spin_fixed(space);
  const auto traj = helix(M_PI / 4, 1.0, 512);
  Vector mix = build_photon_state(space, 1, 0).amplitudes() + 0.5 * build_photon_state(space, 0, 1).amplitudes();
  const auto v0 = evolution_operator_v(M_PI / 4, 0.0, spin);
  const auto psi0 = v0.apply(StateVector(space, mix)).normalized();
  const auto r = run(psi0, traj, spin);
  CHECK_FALSE(r.series.final.closed_form_valid);
  CHECK(std::abs(r.evolution.norms.back() - 1.0) < 1e-9);
}

TEST_CASE("evolution preconditions and guards") {
  const FockSpace space(3, 1);
  const auto spin = spin_fixed(space);
  const auto traj = helix(M_PI / 4, 1.0, 64);
  const auto psi = helicity_state(space, traj.tangents.front(), 1);

  const StateVector unnormalized(space, 2.0 * psi.amplitudes());
  CHECK_THROWS_AS(evolve_state(unnormalized, traj, spin), ValidationError);

  auto even = traj;
  even.times.pop_back();
  even.tangents.pop_back();
  even.derivatives.pop_back();
  CHECK_THROWS_AS(evolve_state(psi, even, spin), ValidationError);

  // Twenty turns on 64 steps rotates too far per step.
  const auto fast = helix(M_PI / 2, 20.0, 64);
  CHECK_THROWS_AS(evolve_state(psi, fast, spin), GuardViolation);
  EvolutionOptions loose;
  loose.step_guard = 1e6;
  CHECK_NOTHROW(evolve_state(psi, fast, spin, loose));

  // A state orthogonal to its own evolution makes the phase ill-conditioned.
  // An x-polarized photon rotated a quarter turn about z ends up y-polarized.
  const auto quarter = helix(M_PI / 2, 0.25, 512);
  const std::array<int, 3> x_occ{1, 0, 0};
  const auto linear = StateVector::basis_state(space, x_occ);
  const auto evolution = evolve_state(linear, quarter, spin);
  CHECK_THROWS_AS(extract_phases(evolution, quarter, spin), GuardViolation);
}
