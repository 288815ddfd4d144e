#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "ionmcmr/commands.hpp"
#include "ionmcmr/error.hpp"

namespace {

int exit_code(ionmcmr::ErrorCategory c) {
  switch (c) {
    case ionmcmr::ErrorCategory::Config: return 2;
    case ionmcmr::ErrorCategory::Numerical: return 3;
    case ionmcmr::ErrorCategory::Convergence: return 4;
  }
  return 1;
}

const std::map<std::string, std::string> descriptions = {
    {"polarizability", "scalar and tensor polarizabilities of the listed levels"},
    {"levels", "dressed energies of the listed levels over an intensity grid"},
    {"scan-650", "steady P population over 650 nm Rabi frequency and detuning"},
    {"scan-sideband", "steady P population over the 2052 nm sideband offset"},
    {"reset-sim", "optical pumping trajectory and fitted reset time"},
    {"error-budget", "data-qubit error from absorption and scattering versus intensity"},
    {"detection-time", "detection time scaled from a reference ion"},
    {"fidelity-model", "detection fidelity with a dephased 2052 nm drive"},
    {"dephasing", "Ramsey coherence time from 2052 nm frequency noise"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stark-shift isolated mid-circuit measurement calculators for Ba+"};
  app.set_version_flag("--version", std::string("ionmcmr ") + IONMCMR_VERSION);
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = ".";
  bool as_json = false;
  for (const auto& name : ionmcmr::command_names()) {
    auto* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", config, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory for the CSV");
    sub->add_flag("--json", as_json, "print the scalar results as JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const auto scenario = ionmcmr::load_scenario(config);
    const auto result = ionmcmr::run_command(name, scenario);
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / result.file_name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ionmcmr::ConfigError("cannot write " + path.string());
    out << result.csv;
    if (as_json) {
      std::cout << result.summary.dump(2) << "\n";
    } else {
      std::cout << "wrote " << path.string() << "\n" << result.summary.dump() << "\n";
    }
  } catch (const ionmcmr::Error& e) {
    std::cerr << "ionmcmr " << name << ": " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "ionmcmr " << name << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
