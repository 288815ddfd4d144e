#include "ionmcmr/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "ionmcmr/error.hpp"

namespace ionmcmr {

using nlohmann::json;
using units::Dimension;

namespace {

constexpr const char* schema_tag = "ionmcmr-scenario/1";

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

}  // namespace

void ConfigNode::fail(const std::string& msg) const { throw ConfigError(origin_ + ":" + pointer_ + ": " + msg); }

ConfigNode ConfigNode::operator[](const char* key) const {
  if (!value_->is_object()) fail("expected an object");
  if (!value_->contains(key)) fail(std::string("missing field '") + key + "'");
  return ConfigNode(value_->at(key), origin_, pointer_ + "/" + escape_pointer(key));
}

ConfigNode ConfigNode::at(std::size_t index) const {
  if (!value_->is_array()) fail("expected an array");
  if (index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
  return ConfigNode(value_->at(index), origin_, pointer_ + "/" + std::to_string(index));
}

std::size_t ConfigNode::size() const {
  if (!value_->is_array()) fail("expected an array");
  return value_->size();
}

double ConfigNode::quantity(Dimension dim) const {
  if (dim == Dimension::Dimensionless) return number();
  if (!value_->is_string()) fail(std::string("expected a string with a unit, ") + units::dimension_name(dim));
  try {
    return units::parse_quantity(value_->get<std::string>(), dim);
  } catch (const ConfigError& e) {
    fail(e.what());
  }
}

double ConfigNode::number() const {
  if (!value_->is_number()) fail("expected a number");
  const double v = value_->get<double>();
  if (!std::isfinite(v)) fail("non-finite number");
  return v;
}

int ConfigNode::integer() const {
  if (!value_->is_number_integer()) fail("expected an integer");
  return value_->get<int>();
}

std::string ConfigNode::string() const {
  if (!value_->is_string()) fail("expected a string");
  return value_->get<std::string>();
}

bool ConfigNode::boolean() const {
  if (!value_->is_boolean()) fail("expected true or false");
  return value_->get<bool>();
}

Eigen::Vector3cd ConfigNode::complex_vector() const {
  if (!value_->is_array() || value_->size() != 3) fail("expected a 3-vector");
  Eigen::Vector3cd v;
  for (std::size_t k = 0; k < 3; ++k) {
    const ConfigNode e = at(k);
    if (e.json().is_array()) {
      if (e.size() != 2) e.fail("complex entries are [re, im]");
      v[k] = std::complex<double>(e.at(0).number(), e.at(1).number());
    } else {
      v[k] = e.number();
    }
  }
  if (v.norm() == 0.0) fail("zero vector");
  return v.normalized();
}

Eigen::Vector3d ConfigNode::real_vector() const {
  const Eigen::Vector3cd v = complex_vector();
  if (v.imag().norm() != 0.0) fail("expected a real vector");
  return v.real();
}

std::vector<double> ConfigNode::grid(Dimension dim) const {
  if (value_->is_array()) return quantity_list(dim);
  only({"start", "stop", "count"});
  const double start = (*this)["start"].quantity(dim), stop = (*this)["stop"].quantity(dim);
  const int count = (*this)["count"].integer();
  if (count < 0) (*this)["count"].fail("negative grid size");
  if (count == 1 && start != stop) fail("a one-point grid needs start == stop");
  if (stop < start) fail("grid must be increasing");
  std::vector<double> g;
  for (int k = 0; k < count; ++k) g.push_back(count == 1 ? start : start + (stop - start) * k / (count - 1));
  return g;
}

std::vector<double> ConfigNode::quantity_list(Dimension dim) const {
  std::vector<double> out;
  for (std::size_t k = 0; k < size(); ++k) out.push_back(at(k).quantity(dim));
  return out;
}

std::vector<std::string> ConfigNode::string_list() const {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < size(); ++k) out.push_back(at(k).string());
  return out;
}

void ConfigNode::only(std::initializer_list<const char*> allowed) const {
  if (!value_->is_object()) fail("expected an object");
  for (const auto& [key, _] : value_->items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail("unknown field '" + key + "'");
    }
  }
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("IONMCMR_DATA_DIR"); env && *env) return env;
#ifdef IONMCMR_DEFAULT_DATA_DIR
  return IONMCMR_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

std::filesystem::path Scenario::resolve_species(const std::string& name) const {
  const std::filesystem::path local = directory / name;
  if (std::filesystem::exists(local)) return local;
  const std::filesystem::path shipped = data_directory() / name;
  if (std::filesystem::exists(shipped)) return shipped;
  throw ConfigError(origin + ":/species: species file '" + name + "' not found next to the scenario or in " +
                    data_directory().string());
}

Scenario scenario_from_json(json doc, const std::string& origin, const std::filesystem::path& directory) {
  Scenario s;
  s.doc = std::move(doc);
  s.origin = origin;
  s.directory = directory;
  const ConfigNode root = s.root();
  if (!s.doc.is_object()) root.fail("expected a JSON object");
  if (root["schema"].string() != schema_tag) root["schema"].fail(std::string("unsupported schema, expected ") + schema_tag);
  s.command = root["command"].string();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return scenario_from_json(std::move(doc), path.string(), path.parent_path());
}

LaserField stark_field(const Scenario& scenario) {
  const ConfigNode root = scenario.root();
  LaserField f;
  if (root.has("stark")) {
    const ConfigNode st = root["stark"];
    st.only({"wavelength", "polarization", "wavevector", "axis"});
    if (st.has("wavelength")) f.wavelength_m = st["wavelength"].quantity(Dimension::Length);
    if (st.has("polarization")) f.geometry.epsilon = st["polarization"].complex_vector();
    if (st.has("wavevector")) f.geometry.eta = st["wavevector"].real_vector();
    if (st.has("axis")) f.geometry.b_axis = st["axis"].real_vector();
  }
  if (root.has("intensity")) {
    f.intensity = root["intensity"].quantity(Dimension::Intensity);
    if (f.intensity < 0.0) root["intensity"].fail("negative intensity");
  }
  return f;
}

namespace {

PolarizationGeometry laser_geometry(const ConfigNode& node, double& max_rabi, const Eigen::Vector3d& axis) {
  node.only({"polarization", "wavevector", "max_rabi"});
  PolarizationGeometry g;
  g.epsilon = node["polarization"].complex_vector();
  g.eta = node["wavevector"].real_vector();
  g.b_axis = axis;
  max_rabi = units::two_pi * node["max_rabi"].quantity(Dimension::Frequency);
  if (max_rabi < 0.0) node["max_rabi"].fail("negative Rabi frequency");
  return g;
}

Envelope read_envelope(const ConfigNode& node) {
  node.only({"shape", "slot", "index", "count"});
  Envelope e;
  const std::string shape = node["shape"].string();
  if (shape == "constant") return e;
  if (shape == "square") e.shape = EnvelopeShape::Square;
  else if (shape == "blackman") e.shape = EnvelopeShape::Blackman;
  else node["shape"].fail("unknown envelope '" + shape + "' (constant, square, blackman)");
  e.slot = node["slot"].quantity(Dimension::Time);
  e.slot_index = node["index"].integer();
  e.slot_count = node["count"].integer();
  try {
    e.validate();
  } catch (const ConfigError& err) {
    node.fail(err.what());
  }
  return e;
}

}  // namespace

CyclingConfig cycling_config(const Scenario& scenario) {
  const ConfigNode root = scenario.root();
  CyclingConfig c;
  const std::string species_file = root["species"].string();
  c.species = load_species(scenario.resolve_species(species_file));
  c.b_tesla = root["B"].quantity(Dimension::MagneticField);
  c.stark = stark_field(scenario);
  const Eigen::Vector3d axis = c.stark.geometry.b_axis;
  c.geom_2052 = laser_geometry(root["laser_2052"], c.rabi_2052_max, axis);
  c.geom_650 = laser_geometry(root["laser_650"], c.rabi_650_max, axis);
  if (root.has("gamma")) c.gamma = units::two_pi * root["gamma"].quantity(Dimension::Frequency);
  if (root.has("beta")) c.beta = root["beta"].number();
  if (!(c.beta > 0.0 && c.beta <= 1.0)) root["beta"].fail("branching ratio must lie in (0, 1]");
  if (root.has("secular_cutoff")) c.secular_cutoff = units::two_pi * root["secular_cutoff"].quantity(Dimension::Frequency);
  if (root.has("delta")) c.delta = units::two_pi * root["delta"].quantity(Dimension::Frequency);

  const ConfigNode tones = root["tones"];
  for (std::size_t k = 0; k < tones.size(); ++k) {
    const ConfigNode t = tones.at(k);
    t.only({"name", "laser", "lower", "upper", "detuning", "sideband", "scale", "envelope"});
    ToneSpec spec;
    spec.name = t["name"].string();
    const std::string laser = t["laser"].string();
    if (laser == "2052") spec.laser = Laser::L2052;
    else if (laser == "650") spec.laser = Laser::L650;
    else t["laser"].fail("laser must be \"2052\" or \"650\"");
    try {
      spec.lower = StateSelector::parse(t["lower"].string());
    } catch (const ConfigError& e) {
      t["lower"].fail(e.what());
    }
    try {
      spec.upper = StateSelector::parse(t["upper"].string());
    } catch (const ConfigError& e) {
      t["upper"].fail(e.what());
    }
    if (t.has("detuning")) spec.detuning = units::two_pi * t["detuning"].quantity(Dimension::Frequency);
    if (t.has("sideband")) spec.delta_multiple = t["sideband"].number();
    if (t.has("scale")) spec.scale = t["scale"].number();
    if (spec.scale < 0.0) t["scale"].fail("negative amplitude scale");
    if (t.has("envelope")) spec.envelope = read_envelope(t["envelope"]);
    c.tones.push_back(std::move(spec));
  }
  return c;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw NumericalError("CSV row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string CsvTable::render(const std::string& command, const Scenario& scenario,
                             const std::vector<std::string>& species_files) const {
  std::ostringstream out;
  out << "# ionmcmr " << IONMCMR_VERSION << "\n";
  out << "# command: " << command << "\n";
  out << "# scenario: " << scenario.doc.dump() << "\n";
  for (const auto& file : species_files) {
    out << "# species " << file << ": " << species_to_json(load_species(scenario.resolve_species(file))).dump() << "\n";
  }
  for (std::size_t k = 0; k < columns_.size(); ++k) out << (k ? "," : "") << columns_[k];
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << "\n";
  }
  return out.str();
}

}  // namespace ionmcmr
