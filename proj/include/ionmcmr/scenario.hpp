#pragma once

// Scenario files (schema "ionmcmr-scenario/1") and the CSV output format.
//
// Every physical input carries a unit suffix ("4.1G", "6.1MW/cm2", "2MHz").
// Rabi frequencies and detunings are written as cyclic frequencies and used
// as 2 pi times that value. Errors name the file and the JSON pointer.

#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ionmcmr/cycling.hpp"
#include "ionmcmr/units.hpp"

namespace ionmcmr {

/// A position inside a scenario document.
class ConfigNode {
 public:
  ConfigNode(const nlohmann::json& value, std::string origin, std::string pointer = "")
      : value_(&value), origin_(std::move(origin)), pointer_(std::move(pointer)) {}

  const nlohmann::json& json() const { return *value_; }
  const std::string& pointer() const { return pointer_; }
  bool has(const char* key) const { return value_->is_object() && value_->contains(key); }

  ConfigNode operator[](const char* key) const;
  ConfigNode at(std::size_t index) const;
  std::size_t size() const;

  double quantity(units::Dimension dim) const;
  double number() const;
  int integer() const;
  std::string string() const;
  bool boolean() const;
  /// Three real or [re, im] entries, normalized to unit length.
  Eigen::Vector3cd complex_vector() const;
  Eigen::Vector3d real_vector() const;
  /// Either a list of quantities or {"start", "stop", "count"} (count >= 1).
  std::vector<double> grid(units::Dimension dim) const;
  std::vector<double> quantity_list(units::Dimension dim) const;
  std::vector<std::string> string_list() const;

  /// Throws ConfigError when the object has a key outside `allowed`.
  void only(std::initializer_list<const char*> allowed) const;
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  const nlohmann::json* value_;
  std::string origin_;
  std::string pointer_;
};

struct Scenario {
  nlohmann::json doc;
  std::string origin;               // path as given, used in messages
  std::filesystem::path directory;  // for resolving relative files
  std::string command;              // the "command" field

  ConfigNode root() const { return ConfigNode(doc, origin); }
  /// Species file: relative to the scenario first, then the data directory.
  std::filesystem::path resolve_species(const std::string& name) const;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(nlohmann::json doc, const std::string& origin, const std::filesystem::path& directory);

/// Directory holding the shipped species files; $IONMCMR_DATA_DIR overrides
/// the build-time default.
std::filesystem::path data_directory();

/// Reads the species, field, lasers and tone table of a cycling scenario.
CyclingConfig cycling_config(const Scenario& scenario);
/// The 532 nm beam of a scenario ("stark" object plus "intensity" when present).
LaserField stark_field(const Scenario& scenario);

/// Deterministic CSV writer: "# " provenance lines, one header row, then rows
/// with numbers printed as %.12g.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> cells);
  static std::string number(double v);
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::vector<std::string>& columns() const { return columns_; }

  /// Writes provenance (version, command, canonical scenario and species) and the table.
  std::string render(const std::string& command, const Scenario& scenario,
                     const std::vector<std::string>& species_files) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace ionmcmr
