#include "ionmcmr/atomic_data.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "ionmcmr/error.hpp"

namespace ionmcmr {

namespace {

constexpr std::string_view schema_tag = "ionmcmr-species/1";
constexpr double energy_consistency = 0.01;

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& pointer, const std::string& msg) {
  throw ConfigError(origin + ":" + pointer + ": " + msg);
}

const json& require(const json& obj, const char* key, const std::string& origin, const std::string& pointer) {
  if (!obj.is_object() || !obj.contains(key)) fail(origin, pointer, std::string("missing field '") + key + "'");
  return obj.at(key);
}

double require_number(const json& obj, const char* key, const std::string& origin, const std::string& pointer) {
  const json& v = require(obj, key, origin, pointer);
  if (!v.is_number()) fail(origin, pointer + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(origin, pointer + "/" + key, "non-finite value");
  return x;
}

std::string require_string(const json& obj, const char* key, const std::string& origin, const std::string& pointer) {
  const json& v = require(obj, key, origin, pointer);
  if (!v.is_string()) fail(origin, pointer + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
  return obj.contains(key) && obj.at(key).is_string() ? obj.at(key).get<std::string>() : std::string{};
}

HalfInteger require_half(const json& obj, const char* key, const std::string& origin, const std::string& pointer) {
  const std::string text = require_string(obj, key, origin, pointer);
  try {
    return HalfInteger::parse(text);
  } catch (const ConfigError& e) {
    fail(origin, pointer + "/" + key, e.what());
  }
}

}  // namespace

const Level& Species::level(std::string_view label) const {
  for (const auto& l : levels) {
    if (l.label == label) return l;
  }
  throw ConfigError("species " + name + " has no level '" + std::string(label) + "'");
}

bool Species::has_level(std::string_view label) const {
  for (const auto& l : levels) {
    if (l.label == label) return true;
  }
  return false;
}

HyperfineConstants Species::hyperfine_for(std::string_view label) const {
  for (const auto& h : hyperfine) {
    if (h.level == label) return h;
  }
  return HyperfineConstants{std::string(label), 0.0, 0.0, {}};
}

Species species_from_json(const json& doc, const std::string& origin) {
  if (!doc.is_object()) fail(origin, "", "expected a JSON object");
  if (require_string(doc, "schema", origin, "") != schema_tag) {
    fail(origin, "/schema", "unsupported schema, expected " + std::string(schema_tag));
  }
  Species s;
  s.name = require_string(doc, "species", origin, "");
  s.nuclear_spin = require_half(doc, "nuclear_spin", origin, "");
  if (s.nuclear_spin.twice() < 0) fail(origin, "/nuclear_spin", "negative nuclear spin");

  const json& levels = require(doc, "levels", origin, "");
  if (!levels.is_array()) fail(origin, "/levels", "expected an array");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string ptr = "/levels/" + std::to_string(i);
    Level l;
    l.label = require_string(levels[i], "label", origin, ptr);
    l.j = require_half(levels[i], "J", origin, ptr);
    l.g_j = require_number(levels[i], "g_J", origin, ptr);
    l.energy_hz = require_number(levels[i], "energy_Hz", origin, ptr);
    l.source = optional_string(levels[i], "source");
    if (l.j.twice() < 0) fail(origin, ptr + "/J", "negative J");
    if (l.energy_hz < 0.0) fail(origin, ptr + "/energy_Hz", "negative energy");
    if (!labels.insert(l.label).second) fail(origin, ptr + "/label", "duplicate level label '" + l.label + "'");
    s.levels.push_back(std::move(l));
  }

  const json& lines = require(doc, "lines", origin, "");
  if (!lines.is_array()) fail(origin, "/lines", "expected an array");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string ptr = "/lines/" + std::to_string(i);
    TransitionLine t;
    t.upper = require_string(lines[i], "upper", origin, ptr);
    t.lower = require_string(lines[i], "lower", origin, ptr);
    t.wavelength_nm = require_number(lines[i], "wavelength_nm", origin, ptr);
    t.einstein_a = require_number(lines[i], "A_per_s", origin, ptr);
    t.source = optional_string(lines[i], "source");
    if (!labels.contains(t.upper)) fail(origin, ptr + "/upper", "unknown level '" + t.upper + "'");
    if (!labels.contains(t.lower)) fail(origin, ptr + "/lower", "unknown level '" + t.lower + "'");
    if (t.wavelength_nm <= 0.0) fail(origin, ptr + "/wavelength_nm", "wavelength must be positive");
    if (t.einstein_a <= 0.0) fail(origin, ptr + "/A_per_s", "Einstein A must be positive");
    const double nu_line = units::speed_of_light / t.wavelength_m();
    const double nu_levels = s.level(t.upper).energy_hz - s.level(t.lower).energy_hz;
    if (std::abs(nu_levels - nu_line) > energy_consistency * nu_line) {
      fail(origin, ptr, "wavelength inconsistent with level energies by more than 1%");
    }
    s.lines.push_back(std::move(t));
  }

  if (doc.contains("hyperfine")) {
    const json& hfs = doc.at("hyperfine");
    if (!hfs.is_array()) fail(origin, "/hyperfine", "expected an array");
    for (std::size_t i = 0; i < hfs.size(); ++i) {
      const std::string ptr = "/hyperfine/" + std::to_string(i);
      HyperfineConstants h;
      h.level = require_string(hfs[i], "level", origin, ptr);
      h.a_hz = require_number(hfs[i], "A_Hz", origin, ptr);
      h.b_hz = require_number(hfs[i], "B_Hz", origin, ptr);
      h.source = optional_string(hfs[i], "source");
      if (!labels.contains(h.level)) fail(origin, ptr + "/level", "unknown level '" + h.level + "'");
      const HalfInteger j = s.level(h.level).j;
      if (h.b_hz != 0.0 && (j.twice() < 2 || s.nuclear_spin.twice() < 2)) {
        fail(origin, ptr + "/B_Hz", "quadrupole constant must vanish for J < 1 or I < 1");
      }
      if (s.nuclear_spin.twice() == 0 && h.a_hz != 0.0) {
        fail(origin, ptr + "/A_Hz", "hyperfine constant given for a spin-zero isotope");
      }
      s.hyperfine.push_back(std::move(h));
    }
  }
  return s;
}

Species load_species(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open species file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return species_from_json(doc, path.string());
}

json species_to_json(const Species& s) {
  json doc;
  doc["schema"] = schema_tag;
  doc["species"] = s.name;
  doc["nuclear_spin"] = s.nuclear_spin.str();
  doc["levels"] = json::array();
  for (const auto& l : s.levels) {
    doc["levels"].push_back(
        {{"label", l.label}, {"J", l.j.str()}, {"g_J", l.g_j}, {"energy_Hz", l.energy_hz}, {"source", l.source}});
  }
  doc["lines"] = json::array();
  for (const auto& t : s.lines) {
    doc["lines"].push_back({{"upper", t.upper},
                            {"lower", t.lower},
                            {"wavelength_nm", t.wavelength_nm},
                            {"A_per_s", t.einstein_a},
                            {"source", t.source}});
  }
  doc["hyperfine"] = json::array();
  for (const auto& h : s.hyperfine) {
    doc["hyperfine"].push_back({{"level", h.level}, {"A_Hz", h.a_hz}, {"B_Hz", h.b_hz}, {"source", h.source}});
  }
  return doc;
}

void save_species(const Species& species, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write species file " + path.string());
  out << species_to_json(species).dump(2) << '\n';
}

}  // namespace ionmcmr
