#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fibrephase/fock_algebra.hpp"
#include "fibrephase/gyrotropic_media.hpp"
#include "fibrephase/phase_engine.hpp"

namespace fibrephase {

struct GeometrySpec {
  PathKind kind = PathKind::helix;
  std::optional<double> tilt;  ///< helix tilt from its axis; overrides radius/pitch
  double radius = 1.0;
  double pitch_per_turn = 2.0 * M_PI;
  double turns = 1.0;
  std::filesystem::path file;  ///< sampled path CSV (t,x,y,z)
  bool frame_align = false;
};

/// One term c |n_R, n_L> of the initial state in the frame of k_hat(0).
struct StateTerm {
  int n_r = 0;
  int n_l = 0;
  Complex amplitude{1.0, 0.0};
};

struct Tolerances {
  double phase = 1e-4;
  double norm_drift = 1e-9;
  double lvn_residual = 1e-6;
  double motion_identity = 1e-6;
  double step_guard = 0.1;
};

struct MediumSpec {
  GyrotropicMedium medium;
  double omega = 1.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  GeometrySpec geometry;
  std::vector<StateTerm> state{StateTerm{1, 0, {1.0, 0.0}}};
  Ordering ordering = Ordering::normal;
  int n_max = 2;
  int steps = 8192;
  double k_scale = 1.0;
  Tolerances tolerances;
  std::optional<MediumSpec> medium;
  std::filesystem::path output_dir;  ///< empty: chosen by the caller
};

/// Strict parse: unknown keys and out-of-range values throw ValidationError
/// naming the offending field. Relative sampled-path files resolve against `base_dir`.
ScenarioConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& file);
nlohmann::json config_to_json(const ScenarioConfig& config);

std::vector<std::string> builtin_scenario_names();
/// Configs of a named built-in scenario ("all" expands to every built-in run).
std::vector<ScenarioConfig> builtin_scenario(const std::string& name);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ScenarioReport {
  ScenarioConfig config;
  PhaseSeries series;
  double s3_expectation = 0.0;         ///< <S3> under the configured ordering
  double s3_normal_expectation = 0.0;  ///< <S3> in normal order (what the evolution sees)
  double closed_form_phase = 0.0;      ///< ordering-dependent closed form at t_end
  double closed_form_normal = 0.0;
  double vacuum_phase_r = 0.0;
  double vacuum_phase_l = 0.0;
  std::optional<double> berry_reference;  ///< 2 pi (1 - cos tilt) <S3> per turn, helices only
  double max_step_metric = 0.0;
  double norm_drift = 0.0;
  double lvn_residual_max = 0.0;
  double motion_identity_residual = 0.0;
  std::vector<CheckResult> checks;
  std::optional<std::pair<DispersionVerdict, DispersionVerdict>> verdicts;
  std::vector<double> csv_lambda;
  std::vector<double> csv_gamma;
  std::vector<double> csv_closed;
  std::vector<double> csv_norm;
  std::vector<double> csv_lvn;
  AngleTrajectory angles;

  bool passed() const;
  nlohmann::json summary_json() const;
  std::string phases_csv() const;
  std::string angles_csv() const;
};

/// Runs closed-form and numerical phase computations for one config.
ScenarioReport run_scenario(const ScenarioConfig& config);

/// Writes phases.csv, angles.csv and summary.json into `dir`.
void write_artifacts(const ScenarioReport& report, const std::filesystem::path& dir);

struct SweepRow {
  double value = 0.0;
  ScenarioReport report;
};

/// Independent runs of `base` with one parameter replaced; rows keep the order of `values`.
/// parameter is one of lambda, turns, n_R, n_L, epsilon2.
std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& parameter,
                            const std::vector<double>& values);
std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows);

}  // namespace fibrephase
