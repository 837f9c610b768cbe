#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fibrephase/errors.hpp"
#include "fibrephase/io.hpp"
#include "fibrephase/scenario.hpp"

namespace fs = std::filesystem;
using fibrephase::ScenarioConfig;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitInvalid = 2;

int report_error(const std::string& kind, const std::string& message) {
  nlohmann::json err{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump(2) << "\n";
  return kExitInvalid;
}

std::pair<std::string, std::vector<double>> parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw fibrephase::ValidationError("--sweep: expected PARAM=v1,v2,...");
  }
  std::vector<double> values;
  std::stringstream list(text.substr(eq + 1));
  std::string item;
  while (std::getline(list, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw fibrephase::ValidationError("--sweep: '" + item + "' is not a number");
    }
  }
  return {text.substr(0, eq), values};
}

void print_line(const fibrephase::ScenarioReport& r) {
  const auto& fin = r.series.final;
  std::cout << (r.passed() ? "PASS " : "FAIL ") << r.config.name
            << "  geometric=" << fibrephase::io::format_double(fin.geometric_phase)
            << "  closed_form=" << fibrephase::io::format_double(r.closed_form_phase)
            << "  anholonomy=" << fibrephase::io::format_double(fin.anholonomy_integral) << "\n";
  for (const auto& c : r.checks) {
    if (!c.pass) {
      std::cout << "  check " << c.name << ": " << fibrephase::io::format_double(c.value) << " > "
                << fibrephase::io::format_double(c.tolerance) << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric phases of photons in a curved optical fibre"};
  std::string config_path;
  std::string scenario_name;
  std::string out_dir = "out";
  std::optional<int> steps;
  std::optional<int> n_max;
  std::optional<double> tol;
  std::string sweep_spec;
  bool list = false;

  auto* config_opt = app.add_option("--config", config_path, "Scenario config file (JSON)");
  auto* scenario_opt = app.add_option("--scenario", scenario_name, "Built-in scenario name, or 'all'");
  config_opt->excludes(scenario_opt);
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--steps", steps, "Override the number of integration steps");
  app.add_option("--nmax", n_max, "Override the per-mode occupation cap");
  app.add_option("--tol", tol, "Override the phase tolerance (rad)");
  app.add_option("--sweep", sweep_spec, "Sweep one parameter: PARAM=v1,v2,...");
  app.add_flag("--list", list, "List built-in scenarios and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what());
  }

  if (list) {
    for (const auto& n : fibrephase::builtin_scenario_names()) std::cout << n << "\n";
    return kExitPass;
  }

  try {
    std::vector<ScenarioConfig> configs;
    if (!config_path.empty()) {
      configs.push_back(fibrephase::load_config(config_path));
    } else if (!scenario_name.empty()) {
      configs = fibrephase::builtin_scenario(scenario_name);
    } else {
      throw fibrephase::ValidationError("one of --config or --scenario is required");
    }
    for (auto& c : configs) {
      if (steps) {
        if (*steps < 1) throw fibrephase::ValidationError("--steps: must be >= 1");
        c.steps = *steps;
      }
      if (n_max) {
        if (*n_max < 1) throw fibrephase::ValidationError("--nmax: must be >= 1");
        c.n_max = *n_max;
      }
      if (tol) {
        if (!(*tol > 0.0)) throw fibrephase::ValidationError("--tol: must be > 0");
        c.tolerances.phase = *tol;
      }
    }

    const auto root = [&](const ScenarioConfig& c) {
      return c.output_dir.empty() ? fs::path(out_dir) : c.output_dir;
    };

    bool all_pass = true;
    if (!sweep_spec.empty()) {
      if (configs.size() != 1) throw fibrephase::ValidationError("--sweep: needs a single template scenario");
      const auto [parameter, values] = parse_sweep(sweep_spec);
      const auto rows = fibrephase::sweep(configs.front(), parameter, values);
      const fs::path dir = root(configs.front()) / (configs.front().name + "-sweep-" + parameter);
      for (const auto& row : rows) {
        fibrephase::write_artifacts(row.report, dir / row.report.config.name);
        print_line(row.report);
        all_pass = all_pass && row.report.passed();
      }
      fs::create_directories(dir);
      const auto tmp = dir / "sweep.csv.tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << fibrephase::sweep_csv(parameter, rows);
      }
      fs::rename(tmp, dir / "sweep.csv");
    } else {
      for (const auto& c : configs) {
        const auto report = fibrephase::run_scenario(c);
        fibrephase::write_artifacts(report, root(c) / c.name);
        print_line(report);
        all_pass = all_pass && report.passed();
      }
    }
    return all_pass ? kExitPass : kExitTolerance;
  } catch (const fibrephase::ValidationError& e) {
    return report_error("validation", e.what());
  } catch (const fibrephase::GuardViolation& e) {
    return report_error("guard", e.what());
  } catch (const std::exception& e) {
    return report_error("runtime", e.what());
  }
}
