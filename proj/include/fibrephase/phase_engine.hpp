#pragma once

#include <cstddef>
#include <vector>

#include "fibrephase/fiber_geometry.hpp"
#include "fibrephase/fock_algebra.hpp"

namespace fibrephase {

/// Phase components of one evolution, in radians.
///
/// Sign convention: a positive phase phi multiplies the amplitude by
/// exp(-i phi), so the cyclic value 2 pi (1 - cos lambda) is positive for
/// helicity +1 on a counter-clockwise (gamma increasing) trace.
struct PhaseBreakdown {
  double total_phase = 0.0;         ///< -arg <psi(0)|psi(t)>, unwrapped along the run
  double dynamical_phase = 0.0;     ///< integral of <psi|H_eff|psi> dt
  double geometric_phase = 0.0;     ///< total - dynamical, raw accumulation
  double geometric_phase_mod = 0.0; ///< geometric phase reduced to (-pi, pi]
  double closed_form_phase = 0.0;   ///< <S3> times the anholonomy integral
  double anholonomy_integral = 0.0; ///< integral of gamma_dot (1 - cos lambda) dt
  bool closed_form_valid = false;   ///< initial state is an S3 eigenstate
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<double> norms;
  std::vector<double> lvn_residuals;
  /// Largest ||H_eff||_inf * dt over the run (the step guard metric).
  double max_step_metric = 0.0;
  /// Trajectory sample index of every recorded state.
  std::vector<std::size_t> sample_indices;
};

struct EvolutionOptions {
  /// Refuse to integrate when ||H_eff||_inf * dt reaches this bound.
  double step_guard = 0.1;
  /// Renormalize after each step (off: norm drift stays visible as a diagnostic).
  bool renormalize = false;
  /// Record the Liouville-von Neumann residual every `lvn_stride` steps (0 = never).
  std::size_t lvn_stride = 1;
};

/// Phase series sampled at every recorded evolution step.
struct PhaseSeries {
  std::vector<double> times;
  std::vector<double> total;
  std::vector<double> dynamical;
  std::vector<double> geometric;
  std::vector<double> overlap_magnitude;
  PhaseBreakdown final;
};

/// Running anholonomy integral at every angle sample.
std::vector<double> cumulative_anholonomy(const AngleTrajectory& angles);

/// Integral of gamma_dot (1 - cos lambda) from the first sample to t_end.
/// Off-grid t_end closes with a linearly interpolated trapezoid panel.
double anholonomy_integral(const AngleTrajectory& angles, double t_end);

/// s3_expectation times the anholonomy integral up to t_end.
double closed_form_phase(const AngleTrajectory& angles, double s3_expectation, double t_end);

/// Cyclic adiabatic phase 2 pi (1 - cos lambda) <S3>.
double berry_phase_cyclic(double lambda, double sigma_s3);

/// Effective Hamiltonian (k x k_dot)/|k|^2 . S at the grid sample `index`.
OperatorMatrix effective_hamiltonian(const TangentTrajectory& traj, const SpinComponents& spin,
                                     std::size_t index);
/// Same, looked up by time; t must be a grid node.
OperatorMatrix effective_hamiltonian(const TangentTrajectory& traj, const SpinComponents& spin, double t);

/// Max-norm of dI/dt + (1/i)[I, H_eff] with I = k_hat . S, evaluated
/// sector by sector on total photon number <= n_max.
double lvn_residual(const TangentTrajectory& traj, const SpinComponents& spin, std::size_t index);
double lvn_residual(const TangentTrajectory& traj, const SpinComponents& spin, double t);

/// Integrates i d|psi>/dt = H_eff(t)|psi> with fixed-step RK4.
///
/// The trajectory must have an odd number of samples: every RK4 step spans
/// two sample intervals and takes its midpoint stage at the odd sample, which
/// must sit at the interval midpoint. Throws GuardViolation when
/// ||H_eff||_inf * dt >= options.step_guard anywhere on the grid.
EvolutionResult evolve_state(const StateVector& psi0, const TangentTrajectory& traj,
                             const SpinComponents& spin, const EvolutionOptions& options = {});

/// Splits a numerical evolution into total, dynamical and geometric phases.
///
/// The closed-form entry is filled from the normal-order S3 when psi(0) is an
/// S3 eigenstate; otherwise closed_form_valid is false. Throws GuardViolation
/// when the final overlap |<psi(0)|psi(T)>| is below 1e-6.
PhaseSeries extract_phases(const EvolutionResult& result, const TangentTrajectory& traj,
                           const SpinComponents& spin);

/// V = exp(beta S_+ - beta^* S_-), beta = -(lambda/2) exp(-i gamma).
OperatorMatrix evolution_operator_v(double lambda, double gamma, const SpinComponents& spin);
OperatorMatrix evolution_operator_v(double lambda, double gamma, const FockSpace& space);

/// Matrix exponential by scaling and squaring of a truncated Taylor series
/// (series tail below 1e-14 after scaling).
Matrix matrix_exponential(const Matrix& m);

}  // namespace fibrephase
