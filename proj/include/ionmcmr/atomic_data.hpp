#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ionmcmr/angular.hpp"
#include "ionmcmr/units.hpp"

namespace ionmcmr {

struct Level {
  std::string label;  // e.g. "5D3/2"
  HalfInteger j;
  double g_j = 0.0;
  double energy_hz = 0.0;  // relative to the species ground state
  std::string source;

  bool operator==(const Level&) const = default;
};

struct TransitionLine {
  std::string upper;
  std::string lower;
  double wavelength_nm = 0.0;  // vacuum; kept in file units so serialization round-trips exactly
  double einstein_a = 0.0;     // 1/s, spontaneous decay upper -> lower
  std::string source;

  double wavelength_m() const { return wavelength_nm * 1e-9; }
  double angular_frequency() const { return units::angular_from_wavelength(wavelength_m()); }
  bool operator==(const TransitionLine&) const = default;
};

struct HyperfineConstants {
  std::string level;
  double a_hz = 0.0;
  double b_hz = 0.0;
  std::string source;

  bool operator==(const HyperfineConstants&) const = default;
};

/// Static atomic structure of one isotope. Immutable after loading.
struct Species {
  std::string name;
  HalfInteger nuclear_spin;
  std::vector<Level> levels;
  std::vector<TransitionLine> lines;
  std::vector<HyperfineConstants> hyperfine;

  /// Throws ConfigError for an unknown label.
  const Level& level(std::string_view label) const;
  bool has_level(std::string_view label) const;
  /// Zero constants when the level has no hyperfine entry.
  HyperfineConstants hyperfine_for(std::string_view label) const;

  bool operator==(const Species&) const = default;
};

/// A monochromatic, linearly (or elliptically) polarized travelling wave.
struct LaserField {
  double wavelength_m = 532e-9;
  double intensity = 0.0;  // W/m^2
  PolarizationGeometry geometry;

  double angular_frequency() const { return units::angular_from_wavelength(wavelength_m); }
  double field_amplitude_squared() const { return units::field_amplitude_squared(intensity); }
};

/// Reads and validates a species file (schema "ionmcmr-species/1", see README.md).
/// Errors carry the file path and the JSON pointer of the offending entry.
Species load_species(const std::filesystem::path& path);
Species species_from_json(const nlohmann::json& doc, const std::string& origin = "<memory>");
nlohmann::json species_to_json(const Species& species);
void save_species(const Species& species, const std::filesystem::path& path);

}  // namespace ionmcmr
