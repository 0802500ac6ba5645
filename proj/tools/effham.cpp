// Command-line front end: scenario runs, parameter sweeps, and the
// closed-form table verification. CSV output only; plotting stays external.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "effham/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int list_scenarios() {
  for (const effham::ScenarioInfo& info : effham::scenario_registry()) {
    std::cout << info.name << "\n  " << info.description << "\n  parameters:";
    for (const std::string& name : info.parameter_names) std::cout << " " << name;
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-hierarchy effective dynamics for laser-driven multi-level systems"};
  app.require_subcommand(1);

  std::string config_path;
  auto* cmd_run = app.add_subcommand("run", "execute a run configuration");
  cmd_run->add_option("config", config_path, "configuration file")->required();

  std::string sweep_config;
  effham::SweepSpec sweep_spec;
  auto* cmd_sweep = app.add_subcommand("sweep", "sweep one scenario parameter");
  cmd_sweep->add_option("config", sweep_config, "configuration file")->required();
  cmd_sweep->add_option("--param", sweep_spec.parameter, "parameter to sweep")->required();
  cmd_sweep->add_option("--from", sweep_spec.from, "first value")->required();
  cmd_sweep->add_option("--to", sweep_spec.to, "last value")->required();
  cmd_sweep->add_option("--points", sweep_spec.points, "number of points")->required();

  std::vector<double> x_values{0.01, 0.04, 0.08, 0.16, 0.25};
  std::vector<double> alpha_values{0.28, 0.5};
  auto* cmd_table = app.add_subcommand(
      "verify-table1", "check the three-level Rabi-frequency formulas");
  cmd_table->add_option("--x", x_values, "coupling parameters x");
  cmd_table->add_option("--alpha", alpha_values, "asymmetry parameters alpha");

  auto* cmd_list = app.add_subcommand("list-scenarios", "list scenario presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (cmd_list->parsed()) return list_scenarios();

    if (cmd_run->parsed()) {
      const effham::RunConfig config = effham::load_config(config_path);
      const effham::RunResult result = effham::run(config);
      effham::print_summary(result, std::cout);
      return kExitOk;
    }

    if (cmd_sweep->parsed()) {
      const effham::RunConfig config = effham::load_config(sweep_config);
      const auto rows = effham::sweep(config, sweep_spec);
      const std::string path = effham::write_sweep_csv(config, sweep_spec, rows);
      std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
      return kExitOk;
    }

    if (cmd_table->parsed()) {
      const effham::Table1Report report = effham::verify_table1(x_values, alpha_values);
      effham::print_table1_report(report, std::cout);
      return kExitOk;
    }
  } catch (const effham::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const effham::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
