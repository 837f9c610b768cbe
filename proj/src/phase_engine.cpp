#include "fibrephase/phase_engine.hpp"

#include <algorithm>
#include <cmath>

#include "fibrephase/errors.hpp"
#include "fibrephase/io.hpp"
#include "fibrephase/numerics.hpp"

namespace fibrephase {

namespace {

constexpr double kMinOverlap = 1e-6;
constexpr double kEigenTol = 1e-10;

double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

Vec3 rotation_rate(const TangentTrajectory& traj, std::size_t index) {
  const Vec3 k = traj.wave_vector(index);
  const Vec3 k_dot = traj.wave_vector_rate(index);
  return k.cross(k_dot) / k.squaredNorm();
}

std::vector<double> anholonomy_integrand(const AngleTrajectory& angles) {
  std::vector<double> f(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    f[i] = angles.gamma_dot[i] * (1.0 - std::cos(angles.lambda[i]));
  }
  return f;
}

void check_rk4_grid(const TangentTrajectory& traj) {
  const std::size_t n = traj.size();
  if (n < 3 || n % 2 == 0) {
    throw ValidationError("evolution grid needs an odd number (>= 3) of samples, got " + std::to_string(n));
  }
  const double span = traj.times.back() - traj.times.front();
  for (std::size_t i = 1; i + 1 < n; i += 2) {
    const double mid = 0.5 * (traj.times[i - 1] + traj.times[i + 1]);
    if (std::abs(traj.times[i] - mid) > 1e-12 * std::max(1.0, span)) {
      throw ValidationError("odd sample " + std::to_string(i) + " is not the midpoint of its RK4 step");
    }
  }
}

}  // namespace

std::vector<double> cumulative_anholonomy(const AngleTrajectory& angles) {
  const auto f = anholonomy_integrand(angles);
  return numerics::cumulative_simpson(angles.times, f);
}

double anholonomy_integral(const AngleTrajectory& angles, double t_end) {
  const auto& t = angles.times;
  if (t.empty()) throw ValidationError("empty angle trajectory");
  const double tol = 1e-12 * std::max(1.0, std::abs(t.back() - t.front()));
  if (!(t_end >= t.front() - tol && t_end <= t.back() + tol)) {
    throw ValidationError("t_end " + io::format_double(t_end) + " outside the trajectory grid");
  }
  const auto cumulative = cumulative_anholonomy(angles);
  auto it = std::lower_bound(t.begin(), t.end(), t_end - tol);
  const auto i = static_cast<std::size_t>(it - t.begin());
  if (std::abs(t[i] - t_end) <= tol) return cumulative[i];
  // t_end strictly inside (t[i-1], t[i])
  const auto f = anholonomy_integrand(angles);
  const double w = (t_end - t[i - 1]) / (t[i] - t[i - 1]);
  const double f_end = (1.0 - w) * f[i - 1] + w * f[i];
  return cumulative[i - 1] + 0.5 * (t_end - t[i - 1]) * (f[i - 1] + f_end);
}

double closed_form_phase(const AngleTrajectory& angles, double s3_expectation, double t_end) {
  return s3_expectation * anholonomy_integral(angles, t_end);
}

double berry_phase_cyclic(double lambda, double sigma_s3) {
  if (!(lambda >= 0.0 && lambda <= M_PI)) throw ValidationError("lambda must lie in [0, pi]");
  return 2.0 * M_PI * (1.0 - std::cos(lambda)) * sigma_s3;
}

OperatorMatrix effective_hamiltonian(const TangentTrajectory& traj, const SpinComponents& spin,
                                     std::size_t index) {
  if (index >= traj.size()) throw ValidationError("trajectory index out of range");
  return spin.dot(rotation_rate(traj, index));
}

OperatorMatrix effective_hamiltonian(const TangentTrajectory& traj, const SpinComponents& spin, double t) {
  return effective_hamiltonian(traj, spin, traj.index_of(t));
}

double lvn_residual(const TangentTrajectory& traj, const SpinComponents& spin, std::size_t index) {
  if (index >= traj.size()) throw ValidationError("trajectory index out of range");
  const Vec3 k_hat = traj.wave_vector(index).normalized();
  const OperatorMatrix invariant = spin.dot(k_hat);
  const OperatorMatrix invariant_rate = spin.dot(traj.derivatives[index]);
  const OperatorMatrix h = effective_hamiltonian(traj, spin, index);
  const Complex minus_i(0.0, -1.0);
  double worst = 0.0;
  for (const auto& sector : spin.s1.space().number_sectors(spin.s1.space().n_max())) {
    const Matrix i_b = invariant.compressed(sector);
    const Matrix h_b = h.compressed(sector);
    const Matrix r = invariant_rate.compressed(sector) + minus_i * (i_b * h_b - h_b * i_b);
    if (r.size() > 0) worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

double lvn_residual(const TangentTrajectory& traj, const SpinComponents& spin, double t) {
  return lvn_residual(traj, spin, traj.index_of(t));
}

EvolutionResult evolve_state(const StateVector& psi0, const TangentTrajectory& traj,
                             const SpinComponents& spin, const EvolutionOptions& options) {
  if (!(psi0.space() == spin.s1.space())) throw ValidationError("state and spin live on different spaces");
  if (!psi0.is_normalized(1e-12)) throw ValidationError("initial state must be normalized");
  check_rk4_grid(traj);

  const std::size_t steps = (traj.size() - 1) / 2;
  const Complex minus_i(0.0, -1.0);
  EvolutionResult out;
  out.times.reserve(steps + 1);
  out.states.reserve(steps + 1);
  out.norms.reserve(steps + 1);

  auto record = [&](std::size_t sample, const Vector& psi, std::size_t step) {
    out.times.push_back(traj.times[sample]);
    out.sample_indices.push_back(sample);
    out.states.emplace_back(psi0.space(), psi);
    out.norms.push_back(psi.norm());
    const bool want_lvn = options.lvn_stride > 0 && (step % options.lvn_stride == 0 || step == steps);
    out.lvn_residuals.push_back(want_lvn ? lvn_residual(traj, spin, sample) : 0.0);
  };

  auto hamiltonian = [&](std::size_t sample, double dt) {
    Matrix h = effective_hamiltonian(traj, spin, sample).entries();
    const double metric = inf_norm(h) * dt;
    out.max_step_metric = std::max(out.max_step_metric, metric);
    if (metric >= options.step_guard) {
      throw GuardViolation("step guard violated at t=" + io::format_double(traj.times[sample]) +
                           ": ||H_eff||*dt = " + io::format_double(metric) + " >= " +
                           io::format_double(options.step_guard));
    }
    return h;
  };

  Vector psi = psi0.amplitudes();
  record(0, psi, 0);
  Matrix h_start = hamiltonian(0, traj.times[2] - traj.times[0]);
  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t s0 = 2 * step;
    const double dt = traj.times[s0 + 2] - traj.times[s0];
    const Matrix h_mid = hamiltonian(s0 + 1, dt);
    Matrix h_end = hamiltonian(s0 + 2, dt);

    const Vector k1 = minus_i * (h_start * psi);
    const Vector k2 = minus_i * (h_mid * (psi + 0.5 * dt * k1));
    const Vector k3 = minus_i * (h_mid * (psi + 0.5 * dt * k2));
    const Vector k4 = minus_i * (h_end * (psi + dt * k3));
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (options.renormalize) psi.normalize();

    record(s0 + 2, psi, step + 1);
    h_start = std::move(h_end);
  }
  return out;
}

PhaseSeries extract_phases(const EvolutionResult& result, const TangentTrajectory& traj,
                           const SpinComponents& spin) {
  if (result.states.empty()) throw ValidationError("empty evolution result");
  const std::size_t n = result.states.size();
  const StateVector& psi0 = result.states.front();

  PhaseSeries series;
  series.times = result.times;
  series.total.resize(n);
  series.overlap_magnitude.resize(n);

  double previous_arg = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex overlap = psi0.inner(result.states[i]);
    series.overlap_magnitude[i] = std::abs(overlap);
    const double arg = std::arg(overlap);
    total = i == 0 ? -arg : total - numerics::wrap_angle(arg - previous_arg);
    previous_arg = arg;
    series.total[i] = total;
  }
  if (series.overlap_magnitude.back() < kMinOverlap) {
    throw GuardViolation("final overlap |<psi(0)|psi(T)>| = " +
                         io::format_double(series.overlap_magnitude.back()) +
                         " is too small for a reliable phase");
  }

  std::vector<double> energy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = effective_hamiltonian(traj, spin, result.sample_indices[i]);
    const auto& psi = result.states[i];
    energy[i] = psi.expectation(h).real() / psi.amplitudes().squaredNorm();
  }
  series.dynamical = numerics::cumulative_simpson(series.times, energy);
  series.geometric.resize(n);
  for (std::size_t i = 0; i < n; ++i) series.geometric[i] = series.total[i] - series.dynamical[i];

  const AngleTrajectory angles = spherical_angles(traj);
  const auto cumulative = cumulative_anholonomy(angles);

  // Initial-frame state: undo the rotation that carried z to k_hat(0).
  const auto v0 = evolution_operator_v(angles.lambda.front(), angles.gamma.front(), spin);
  const StateVector frame_state = v0.adjoint().apply(psi0);
  const double s3 = frame_state.expectation(spin.s3).real();
  const Vector residual = spin.s3.entries() * frame_state.amplitudes() - s3 * frame_state.amplitudes();

  auto& fin = series.final;
  fin.total_phase = series.total.back();
  fin.dynamical_phase = series.dynamical.back();
  fin.geometric_phase = series.geometric.back();
  fin.geometric_phase_mod = numerics::wrap_angle(fin.geometric_phase);
  fin.anholonomy_integral = cumulative[result.sample_indices.back()];
  fin.closed_form_valid = residual.norm() <= kEigenTol;
  fin.closed_form_phase = fin.closed_form_valid ? s3 * fin.anholonomy_integral : 0.0;
  return series;
}

Matrix matrix_exponential(const Matrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("matrix exponential needs a square matrix");
  const auto dim = m.rows();
  if (dim == 0) return m;
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix a = m / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(dim, dim);
  Matrix term = Matrix::Identity(dim, dim);
  for (int k = 1; k <= 40; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().colwise().sum().maxCoeff() < 1e-17) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

OperatorMatrix evolution_operator_v(double lambda, double gamma, const SpinComponents& spin) {
  if (lambda == 0.0) return OperatorMatrix::identity(spin.s1.space());
  const Complex i(0.0, 1.0);
  const Complex beta = -0.5 * lambda * std::exp(-i * gamma);
  const Matrix s_plus = spin.s1.entries() + i * spin.s2.entries();
  const Matrix s_minus = spin.s1.entries() - i * spin.s2.entries();
  const Matrix generator = beta * s_plus - std::conj(beta) * s_minus;
  return {spin.s1.space(), matrix_exponential(generator)};
}

OperatorMatrix evolution_operator_v(double lambda, double gamma, const FockSpace& space) {
  return evolution_operator_v(lambda, gamma, spin_fixed(space));
}

}  // namespace fibrephase
