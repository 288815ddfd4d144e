#include <doctest.h>

#include <algorithm>
#include <functional>
#include <sstream>

#include "ionmcmr/commands.hpp"
#include "ionmcmr/error.hpp"

using namespace ionmcmr;
using nlohmann::json;

namespace {

Scenario shipped(const std::string& file) { return load_scenario(std::string(IONMCMR_SCENARIO_DIR) + "/" + file); }

Scenario edited(const std::string& file, const std::function<void(json&)>& edit) {
  const Scenario s = shipped(file);
  json doc = s.doc;
  edit(doc);
  return scenario_from_json(doc, s.origin, s.directory);
}

std::string message_of(const Scenario& s) {
  try {
    run_command(s.command, s);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string header_line(const std::string& csv) {
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') return line;
  }
  return "";
}

}  // namespace

TEST_CASE("every shipped fast scenario runs") {
  for (const char* f : {"polarizability_532nm.json", "fig5_levels_ba138.json", "fig6_levels_ba137.json",
                        "fig6_levels_ba133.json", "fig4_error_budget.json", "detection_time.json",
                        "fidelity_model.json", "dephasing.json", "fig2b_reset.json"}) {
    const Scenario s = shipped(f);
    const auto r = run_command(s.command, s);
    CHECK(r.file_name == s.doc.at("output").get<std::string>());
    CHECK(!r.csv.empty());
  }
}

TEST_CASE("reruns are byte identical") {
  for (const char* f : {"fig5_levels_ba138.json", "fig4_error_budget.json", "fig2b_reset.json"}) {
    const Scenario s = shipped(f);
    CHECK(run_command(s.command, s).csv == run_command(s.command, s).csv);
  }
}

TEST_CASE("CSV header carries version, command, scenario and species") {
  const Scenario s = shipped("fig5_levels_ba138.json");
  const std::string csv = run_command(s.command, s).csv;
  CHECK(csv.rfind("# ionmcmr ", 0) == 0);
  CHECK(csv.find("\n# command: levels\n") != std::string::npos);
  CHECK(csv.find("\n# scenario: {") != std::string::npos);
  CHECK(csv.find("\n# species ba138.json: {") != std::string::npos);
}

TEST_CASE("138Ba+ level table has one column per dressed state") {
  const Scenario s = shipped("fig5_levels_ba138.json");
  const std::string header = header_line(run_command(s.command, s).csv);
  CHECK(std::count(header.begin(), header.end(), ',') == 4 + 2 + 2);
  CHECK(header.rfind("intensity_MW_cm2,5D3/2[0]_MHz", 0) == 0);
}

TEST_CASE("wrong unit dimension names the JSON pointer") {
  const auto s = edited("fig5_levels_ba138.json", [](json& d) { d["B"] = "4.1T/s"; });
  CHECK_THROWS_AS(run_command(s.command, s), ConfigError);
  const auto tesla = edited("fig5_levels_ba138.json", [](json& d) { d["B"] = "4.1Hz"; });
  CHECK(message_of(tesla).find("/B") != std::string::npos);
  const auto nested = edited("fig7b_sideband.json", [](json& d) { d["laser_650"]["max_rabi"] = "12nm"; });
  CHECK(message_of(nested).find("/laser_650/max_rabi") != std::string::npos);
}

TEST_CASE("unknown keys, wrong schema and wrong command are rejected") {
  const auto extra = edited("dephasing.json", [](json& d) { d["linewidht"] = json::array(); });
  CHECK(message_of(extra).find("linewidht") != std::string::npos);
  const Scenario base = shipped("dephasing.json");
  json doc = base.doc;
  doc["schema"] = "ionmcmr-scenario/0";
  CHECK_THROWS_AS(scenario_from_json(doc, base.origin, base.directory), ConfigError);
  CHECK_THROWS_AS(run_command("levels", base), ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("missing species file is a configuration error") {
  const auto s = edited("polarizability_532nm.json", [](json& d) { d["species"] = "ba999.json"; });
  CHECK_THROWS_AS(run_command(s.command, s), ConfigError);
}
