#include "fibrephase/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include "fibrephase/errors.hpp"
#include "fibrephase/io.hpp"
#include "fibrephase/numerics.hpp"

namespace fibrephase {

using nlohmann::json;

namespace {

// --- strict parsing helpers -------------------------------------------------

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.contains(key)) throw ValidationError(where + key + ": unknown key");
  }
}

const json& get_field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + key + ": required");
  return j.at(key);
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  const auto& v = get_field(j, key, where);
  if (!v.is_number()) throw ValidationError(where + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where + key + ": must be finite");
  return x;
}

double get_positive(const json& j, const std::string& key, const std::string& where) {
  const double x = get_number(j, key, where);
  if (!(x > 0.0)) throw ValidationError(where + key + ": must be > 0");
  return x;
}

int get_int(const json& j, const std::string& key, const std::string& where, int min_value) {
  const auto& v = get_field(j, key, where);
  if (!v.is_number_integer()) throw ValidationError(where + key + ": expected an integer");
  const auto x = v.get<long long>();
  if (x < min_value || x > 1'000'000'000) {
    throw ValidationError(where + key + ": must be >= " + std::to_string(min_value));
  }
  return static_cast<int>(x);
}

bool get_bool(const json& j, const std::string& key, const std::string& where) {
  const auto& v = get_field(j, key, where);
  if (!v.is_boolean()) throw ValidationError(where + key + ": expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
  const auto& v = get_field(j, key, where);
  if (!v.is_string()) throw ValidationError(where + key + ": expected a string");
  return v.get<std::string>();
}

GeometrySpec parse_geometry(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "geometry.";
  require_object(j, "geometry");
  reject_unknown(j, where, {"kind", "tilt", "radius", "pitch_per_turn", "turns", "file", "frame_align"});
  GeometrySpec g;
  const std::string kind = j.contains("kind") ? get_string(j, "kind", where) : "helix";
  if (j.contains("frame_align")) g.frame_align = get_bool(j, "frame_align", where);
  if (kind == "helix") {
    g.kind = PathKind::helix;
    if (j.contains("file")) throw ValidationError("geometry.file: only valid for kind 'sampled'");
    if (j.contains("tilt")) {
      if (j.contains("radius") || j.contains("pitch_per_turn")) {
        throw ValidationError("geometry.tilt: give either tilt or radius/pitch_per_turn, not both");
      }
      const double tilt = get_number(j, "tilt", where);
      if (!(tilt >= 0.0 && tilt <= M_PI / 2.0)) throw ValidationError("geometry.tilt: must lie in [0, pi/2]");
      g.tilt = tilt;
    } else {
      if (j.contains("radius")) g.radius = get_positive(j, "radius", where);
      if (j.contains("pitch_per_turn")) {
        g.pitch_per_turn = get_number(j, "pitch_per_turn", where);
        if (g.pitch_per_turn < 0.0) throw ValidationError("geometry.pitch_per_turn: must be >= 0");
      }
    }
    if (j.contains("turns")) g.turns = get_positive(j, "turns", where);
  } else if (kind == "sampled") {
    g.kind = PathKind::sampled;
    for (const char* k : {"tilt", "radius", "pitch_per_turn", "turns"}) {
      if (j.contains(k)) throw ValidationError(where + k + ": only valid for kind 'helix'");
    }
    if (!j.contains("file")) throw ValidationError("geometry.file: required for kind 'sampled'");
    g.file = get_string(j, "file", where);
    if (g.file.is_relative() && !base_dir.empty()) g.file = base_dir / g.file;
  } else {
    throw ValidationError("geometry.kind: expected 'helix' or 'sampled'");
  }
  return g;
}

std::vector<StateTerm> parse_state(const json& j) {
  require_object(j, "state");
  reject_unknown(j, "state.", {"n_R", "n_L", "terms"});
  if (j.contains("terms")) {
    if (j.contains("n_R") || j.contains("n_L")) {
      throw ValidationError("state.terms: give either terms or n_R/n_L, not both");
    }
    const auto& arr = j.at("terms");
    if (!arr.is_array() || arr.empty()) throw ValidationError("state.terms: expected a non-empty array");
    std::vector<StateTerm> terms;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "state.terms[" + std::to_string(i) + "].";
      require_object(arr[i], where);
      reject_unknown(arr[i], where, {"n_R", "n_L", "re", "im"});
      StateTerm t;
      t.n_r = arr[i].contains("n_R") ? get_int(arr[i], "n_R", where, 0) : 0;
      t.n_l = arr[i].contains("n_L") ? get_int(arr[i], "n_L", where, 0) : 0;
      const double re = arr[i].contains("re") ? get_number(arr[i], "re", where) : 0.0;
      const double im = arr[i].contains("im") ? get_number(arr[i], "im", where) : 0.0;
      t.amplitude = {re, im};
      terms.push_back(t);
    }
    return terms;
  }
  StateTerm t;
  t.n_r = j.contains("n_R") ? get_int(j, "n_R", "state.", 0) : 0;
  t.n_l = j.contains("n_L") ? get_int(j, "n_L", "state.", 0) : 0;
  return {t};
}

Tolerances parse_tolerances(const json& j) {
  const std::string where = "tolerances.";
  require_object(j, "tolerances");
  reject_unknown(j, where, {"phase", "norm_drift", "lvn_residual", "motion_identity", "step_guard"});
  Tolerances t;
  if (j.contains("phase")) t.phase = get_positive(j, "phase", where);
  if (j.contains("norm_drift")) t.norm_drift = get_positive(j, "norm_drift", where);
  if (j.contains("lvn_residual")) t.lvn_residual = get_positive(j, "lvn_residual", where);
  if (j.contains("motion_identity")) t.motion_identity = get_positive(j, "motion_identity", where);
  if (j.contains("step_guard")) t.step_guard = get_positive(j, "step_guard", where);
  return t;
}

MediumSpec parse_medium(const json& j) {
  const std::string where = "medium.";
  require_object(j, "medium");
  reject_unknown(j, where, {"epsilon1", "epsilon2", "epsilon3", "mu", "omega"});
  MediumSpec m;
  m.medium.epsilon1 = get_number(j, "epsilon1", where);
  m.medium.epsilon2 = get_number(j, "epsilon2", where);
  if (j.contains("epsilon3")) m.medium.epsilon3 = get_number(j, "epsilon3", where);
  if (j.contains("mu")) m.medium.mu = get_number(j, "mu", where);
  if (j.contains("omega")) m.omega = get_positive(j, "omega", where);
  return m;
}

// --- run helpers ------------------------------------------------------------

FiberPath build_path(const GeometrySpec& g, int samples) {
  if (g.kind == PathKind::sampled) return read_path_csv(g.file);
  if (g.tilt) return make_tilted_helix(*g.tilt, g.turns, samples);
  return make_helix(g.radius, g.pitch_per_turn, g.turns, samples);
}

StateVector frame_state(const FockSpace& space, const std::vector<StateTerm>& terms) {
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
  for (const auto& t : terms) psi += t.amplitude * build_photon_state(space, t.n_r, t.n_l).amplitudes();
  if (psi.norm() == 0.0) throw ValidationError("state: amplitudes sum to the zero vector");
  return StateVector(space, psi).normalized();
}

CheckResult check_at_most(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, value <= tolerance};
}

std::string csv_line(std::initializer_list<double> values) {
  std::string line;
  bool first = true;
  for (double v : values) {
    if (!first) line += ',';
    line += io::format_double(v);
    first = false;
  }
  line += '\n';
  return line;
}

void write_file_atomic(const std::filesystem::path& file, const std::string& content) {
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, file);
}

ScenarioConfig helix_config(std::string name, double tilt, int n_r, int n_l, Ordering ordering, int n_max,
                            int steps, bool aligned) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.geometry.kind = PathKind::helix;
  c.geometry.tilt = tilt;
  c.geometry.turns = 1.0;
  c.geometry.frame_align = aligned;
  c.state = {StateTerm{n_r, n_l, {1.0, 0.0}}};
  c.ordering = ordering;
  c.n_max = n_max;
  c.steps = steps;
  return c;
}

}  // namespace

// --- config -----------------------------------------------------------------

ScenarioConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  require_object(j, "config");
  reject_unknown(j, "", {"name", "geometry", "state", "ordering", "n_max", "steps", "k_scale", "tolerances",
                         "medium", "output_dir"});
  ScenarioConfig c;
  if (j.contains("name")) c.name = get_string(j, "name", "");
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    throw ValidationError("name: must be a non-empty name without path separators");
  }
  if (j.contains("geometry")) c.geometry = parse_geometry(j.at("geometry"), base_dir);
  if (j.contains("state")) c.state = parse_state(j.at("state"));
  if (j.contains("ordering")) {
    try {
      c.ordering = parse_ordering(get_string(j, "ordering", ""));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("ordering: ") + e.what());
    }
  }
  if (j.contains("n_max")) c.n_max = get_int(j, "n_max", "", 1);
  if (j.contains("steps")) c.steps = get_int(j, "steps", "", 1);
  if (j.contains("k_scale")) c.k_scale = get_positive(j, "k_scale", "");
  if (j.contains("tolerances")) c.tolerances = parse_tolerances(j.at("tolerances"));
  if (j.contains("medium")) c.medium = parse_medium(j.at("medium"));
  if (j.contains("output_dir")) {
    c.output_dir = get_string(j, "output_dir", "");
    if (c.output_dir.empty()) throw ValidationError("output_dir: must not be empty");
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j, file.parent_path());
}

json config_to_json(const ScenarioConfig& c) {
  json g;
  if (c.geometry.kind == PathKind::helix) {
    g["kind"] = "helix";
    if (c.geometry.tilt) {
      g["tilt"] = *c.geometry.tilt;
    } else {
      g["radius"] = c.geometry.radius;
      g["pitch_per_turn"] = c.geometry.pitch_per_turn;
    }
    g["turns"] = c.geometry.turns;
  } else {
    g["kind"] = "sampled";
    g["file"] = c.geometry.file.generic_string();
  }
  g["frame_align"] = c.geometry.frame_align;

  json state;
  if (c.state.size() == 1 && c.state.front().amplitude == Complex(1.0, 0.0)) {
    state["n_R"] = c.state.front().n_r;
    state["n_L"] = c.state.front().n_l;
  } else {
    state["terms"] = json::array();
    for (const auto& t : c.state) {
      state["terms"].push_back({{"n_R", t.n_r}, {"n_L", t.n_l}, {"re", t.amplitude.real()}, {"im", t.amplitude.imag()}});
    }
  }

  json j;
  j["name"] = c.name;
  j["geometry"] = g;
  j["state"] = state;
  j["ordering"] = to_string(c.ordering);
  j["n_max"] = c.n_max;
  j["steps"] = c.steps;
  j["k_scale"] = c.k_scale;
  j["tolerances"] = {{"phase", c.tolerances.phase},
                     {"norm_drift", c.tolerances.norm_drift},
                     {"lvn_residual", c.tolerances.lvn_residual},
                     {"motion_identity", c.tolerances.motion_identity},
                     {"step_guard", c.tolerances.step_guard}};
  if (c.medium) {
    j["medium"] = {{"epsilon1", c.medium->medium.epsilon1}, {"epsilon2", c.medium->medium.epsilon2},
                   {"epsilon3", c.medium->medium.epsilon3}, {"mu", c.medium->medium.mu},
                   {"omega", c.medium->omega}};
  }
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir.generic_string();
  return j;
}

std::vector<std::string> builtin_scenario_names() {
  return {"chiao-helix-45", "chiao-helix-45-left", "aligned-helix-45", "multiphoton-2-1",
          "vacuum-pair",    "gyrotropic-right",    "gyrotropic-left"};
}

std::vector<ScenarioConfig> builtin_scenario(const std::string& name) {
  const double quarter = M_PI / 4.0;
  const double third = M_PI / 3.0;
  if (name == "chiao-helix-45") return {helix_config(name, quarter, 1, 0, Ordering::normal, 2, 8192, false)};
  if (name == "chiao-helix-45-left") return {helix_config(name, quarter, 0, 1, Ordering::normal, 2, 8192, false)};
  if (name == "aligned-helix-45") return {helix_config(name, quarter, 1, 0, Ordering::normal, 2, 8192, true)};
  if (name == "multiphoton-2-1") return {helix_config(name, third, 2, 1, Ordering::normal, 3, 4096, true)};
  if (name == "vacuum-pair") {
    return {helix_config("vacuum-pair-R", third, 0, 0, Ordering::nonnormal_r, 1, 2048, false),
            helix_config("vacuum-pair-L", third, 0, 0, Ordering::nonnormal_l, 1, 2048, false)};
  }
  if (name == "gyrotropic-right" || name == "gyrotropic-left") {
    const bool right = name == "gyrotropic-right";
    auto c = helix_config(name, quarter, 0, 0, right ? Ordering::nonnormal_r : Ordering::nonnormal_l, 1, 2048,
                          false);
    c.medium = MediumSpec{GyrotropicMedium{-1.0, right ? 2.0 : -2.0, 1.0, 1.0}, 1.0};
    return {c};
  }
  if (name == "all") {
    std::vector<ScenarioConfig> out;
    for (const auto& n : builtin_scenario_names()) {
      auto part = builtin_scenario(n);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  std::string known;
  for (const auto& n : builtin_scenario_names()) known += " " + n;
  throw ValidationError("unknown scenario '" + name + "' (known:" + known + " all)");
}

// --- run --------------------------------------------------------------------

ScenarioReport run_scenario(const ScenarioConfig& config) {
  if (config.n_max < 1) throw ValidationError("n_max: must be >= 1");
  if (config.steps < 1) throw ValidationError("steps: must be >= 1");
  for (const auto& t : config.state) {
    const int needed = t.n_r + t.n_l + (config.ordering == Ordering::normal ? 0 : 1);
    if (needed > config.n_max) {
      throw ValidationError("n_max: " + std::to_string(config.n_max) + " cannot host state term (n_R=" +
                            std::to_string(t.n_r) + ", n_L=" + std::to_string(t.n_l) + ")" +
                            (config.ordering == Ordering::normal ? "" : " with a zero-point rung"));
    }
  }

  ScenarioReport report;
  report.config = config;

  const FiberPath path = build_path(config.geometry, 2 * config.steps + 1);
  if (config.geometry.kind == PathKind::sampled && path.size() % 2 == 0) {
    throw ValidationError("geometry.file: sampled path needs an odd number of rows");
  }
  if (config.geometry.kind == PathKind::sampled) report.config.steps = static_cast<int>((path.size() - 1) / 2);
  const TangentTrajectory traj = tangent_trajectory(path, config.geometry.frame_align).scaled(config.k_scale);
  report.angles = spherical_angles(traj);
  report.motion_identity_residual = motion_identity_residual(traj);

  const FockSpace space(3, config.n_max);
  const SpinComponents spin = spin_fixed(space);
  const S3Split split = s3_split(space);
  const StateVector chi = frame_state(space, config.state);
  const auto v0 = evolution_operator_v(report.angles.lambda.front(), report.angles.gamma.front(), spin);
  const StateVector psi0 = v0.apply(chi).normalized();

  EvolutionOptions options;
  options.step_guard = config.tolerances.step_guard;
  const EvolutionResult evolution = evolve_state(psi0, traj, spin, options);
  report.series = extract_phases(evolution, traj, spin);

  const double anholonomy = report.series.final.anholonomy_integral;
  report.s3_expectation = chi.expectation(s3_for(split, config.ordering)).real();
  report.s3_normal_expectation = chi.expectation(s3_for(split, Ordering::normal)).real();
  report.closed_form_phase = report.s3_expectation * anholonomy;
  report.closed_form_normal = report.s3_normal_expectation * anholonomy;
  report.vacuum_phase_r = chi.expectation(split.right_nonnormal - split.right_normal).real() * anholonomy;
  report.vacuum_phase_l = chi.expectation(split.left_nonnormal - split.left_normal).real() * anholonomy;
  if (config.geometry.kind == PathKind::helix) {
    const double tilt = config.geometry.tilt ? *config.geometry.tilt
                                             : HelixParams{config.geometry.radius, config.geometry.pitch_per_turn,
                                                           config.geometry.turns, 64}
                                                   .tilt();
    report.berry_reference = berry_phase_cyclic(tilt, report.s3_expectation) * config.geometry.turns;
  }

  report.max_step_metric = evolution.max_step_metric;
  for (double n : evolution.norms) report.norm_drift = std::max(report.norm_drift, std::abs(n - 1.0));
  for (double r : evolution.lvn_residuals) report.lvn_residual_max = std::max(report.lvn_residual_max, r);

  const auto cumulative = cumulative_anholonomy(report.angles);
  for (std::size_t i = 0; i < evolution.states.size(); ++i) {
    const std::size_t s = evolution.sample_indices[i];
    report.csv_lambda.push_back(report.angles.lambda[s]);
    report.csv_gamma.push_back(report.angles.gamma[s]);
    report.csv_closed.push_back(report.s3_expectation * cumulative[s]);
    report.csv_norm.push_back(evolution.norms[i]);
    report.csv_lvn.push_back(evolution.lvn_residuals[i]);
  }

  if (report.series.final.closed_form_valid) {
    const double gap =
        std::abs(numerics::wrap_angle(report.series.final.geometric_phase - report.closed_form_normal));
    report.checks.push_back(check_at_most("geometric_vs_closed_form", gap, config.tolerances.phase));
  }
  report.checks.push_back(check_at_most("norm_drift", report.norm_drift, config.tolerances.norm_drift));
  report.checks.push_back(check_at_most("lvn_residual", report.lvn_residual_max, config.tolerances.lvn_residual));
  report.checks.push_back(
      check_at_most("motion_identity", report.motion_identity_residual, config.tolerances.motion_identity));
  report.checks.push_back(check_at_most("step_guard", report.max_step_metric, config.tolerances.step_guard));

  if (config.medium) report.verdicts = classify(config.medium->medium, config.medium->omega);
  return report;
}

bool ScenarioReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

json ScenarioReport::summary_json() const {
  const auto& fin = series.final;
  json j;
  j["scenario"] = config.name;
  j["config"] = config_to_json(config);
  j["space"] = {{"num_modes", 3},
                {"n_max", config.n_max},
                {"dimension", static_cast<long long>(std::pow(config.n_max + 1, 3))}};
  json phases;
  phases["total"] = fin.total_phase;
  phases["dynamical"] = fin.dynamical_phase;
  phases["geometric"] = fin.geometric_phase;
  phases["geometric_mod_2pi"] = fin.geometric_phase_mod;
  phases["anholonomy_integral"] = fin.anholonomy_integral;
  phases["closed_form_valid"] = fin.closed_form_valid;
  phases["ordering"] = to_string(config.ordering);
  phases["s3_expectation"] = s3_expectation;
  phases["s3_normal_expectation"] = s3_normal_expectation;
  phases["closed_form"] = closed_form_phase;
  phases["closed_form_normal"] = closed_form_normal;
  phases["vacuum_R"] = vacuum_phase_r;
  phases["vacuum_L"] = vacuum_phase_l;
  phases["berry_cyclic_reference"] = berry_reference ? json(*berry_reference) : json(nullptr);
  j["phases"] = phases;

  double min_overlap = 1.0;
  for (double m : series.overlap_magnitude) min_overlap = std::min(min_overlap, m);
  j["diagnostics"] = {{"steps", config.steps},
                      {"max_step_metric", max_step_metric},
                      {"norm_drift", norm_drift},
                      {"lvn_residual_max", lvn_residual_max},
                      {"motion_identity_residual", motion_identity_residual},
                      {"min_overlap", min_overlap}};
  if (verdicts) {
    json v = json::array();
    for (const auto* d : {&verdicts->first, &verdicts->second}) {
      v.push_back({{"handedness", to_string(d->handedness)},
                   {"n_squared", d->n_squared},
                   {"status", to_string(d->status)},
                   {"propagation_constant", d->propagation_constant}});
    }
    j["medium"] = {{"verdicts", v}};
  }
  json checks_json = json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  j["checks"] = checks_json;
  j["pass"] = passed();
  return j;
}

std::string ScenarioReport::phases_csv() const {
  std::string out = "t,lambda,gamma,phi_closed,phi_total,phi_dyn,phi_geo,norm,lvn_residual\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out += csv_line({series.times[i], csv_lambda[i], csv_gamma[i], csv_closed[i], series.total[i],
                     series.dynamical[i], series.geometric[i], csv_norm[i], csv_lvn[i]});
  }
  return out;
}

std::string ScenarioReport::angles_csv() const {
  std::ostringstream out;
  write_angles_csv(out, angles);
  return out.str();
}

void write_artifacts(const ScenarioReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "phases.csv", report.phases_csv());
  write_file_atomic(dir / "angles.csv", report.angles_csv());
  write_file_atomic(dir / "summary.json", report.summary_json().dump(2) + "\n");
}

// --- sweep ------------------------------------------------------------------

std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& parameter,
                            const std::vector<double>& values) {
  static const std::set<std::string> known{"lambda", "turns", "n_R", "n_L", "epsilon2"};
  if (!known.contains(parameter)) {
    throw ValidationError("sweep: unknown parameter '" + parameter + "' (expected lambda, turns, n_R, n_L, epsilon2)");
  }
  if (values.empty()) throw ValidationError("sweep: no values given");

  std::vector<ScenarioConfig> configs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ScenarioConfig c = base;
    c.name = base.name + "-" + parameter + "-" + std::to_string(i);
    const double v = values[i];
    if (parameter == "lambda") {
      if (c.geometry.kind != PathKind::helix) throw ValidationError("sweep lambda: template must be a helix");
      c.geometry.tilt = v;
    } else if (parameter == "turns") {
      if (c.geometry.kind != PathKind::helix) throw ValidationError("sweep turns: template must be a helix");
      if (!(v > 0.0)) throw ValidationError("sweep turns: values must be > 0");
      c.geometry.turns = v;
    } else if (parameter == "n_R" || parameter == "n_L") {
      if (v < 0.0 || v != std::floor(v)) throw ValidationError("sweep " + parameter + ": values must be integers >= 0");
      if (c.state.size() != 1) throw ValidationError("sweep " + parameter + ": template state must be a single term");
      (parameter == "n_R" ? c.state.front().n_r : c.state.front().n_l) = static_cast<int>(v);
    } else {
      if (!c.medium) throw ValidationError("sweep epsilon2: template has no medium");
      c.medium->medium.epsilon2 = v;
    }
    configs.push_back(std::move(c));
  }

  // Entries are independent; run them concurrently and keep the input order.
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(configs.size(), std::thread::hardware_concurrency()));
  std::vector<SweepRow> rows(configs.size());
  for (std::size_t start = 0; start < configs.size(); start += workers) {
    std::vector<std::future<ScenarioReport>> batch;
    for (std::size_t i = start; i < std::min(configs.size(), start + workers); ++i) {
      batch.push_back(std::async(std::launch::async, [&configs, i] { return run_scenario(configs[i]); }));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) {
      rows[start + k].value = values[start + k];
      rows[start + k].report = batch[k].get();
    }
  }
  return rows;
}

std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows) {
  std::string out = "parameter,value,closed_form_phase,closed_form_normal,geometric_phase,anholonomy_integral,"
                    "n_plus_sq,n_minus_sq,plus_status,minus_status,pass\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out += parameter + ",";
    std::string nums = csv_line({row.value, r.closed_form_phase, r.closed_form_normal,
                                 r.series.final.geometric_phase, r.series.final.anholonomy_integral});
    nums.pop_back();
    out += nums;
    if (r.verdicts) {
      out += "," + io::format_double(r.verdicts->first.n_squared) + "," +
             io::format_double(r.verdicts->second.n_squared) + "," + to_string(r.verdicts->first.status) + "," +
             to_string(r.verdicts->second.status);
    } else {
      out += ",,,,";
    }
    out += std::string(",") + (r.passed() ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace fibrephase
