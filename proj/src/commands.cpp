#include "ionmcmr/commands.hpp"

#include <cmath>

#include "ionmcmr/error.hpp"
#include "ionmcmr/error_budget.hpp"
#include "ionmcmr/level_structure.hpp"
#include "ionmcmr/polarizability.hpp"

namespace ionmcmr {

using nlohmann::json;
using units::Dimension;

namespace {

constexpr double mhz = 1e6;

double to_mhz(double angular) { return angular / units::two_pi / mhz; }

std::string num(double v) { return CsvTable::number(v); }

// Keys every scenario may carry.
#define COMMON_KEYS "schema", "command", "description", "output"
#define CYCLING_KEYS \
  COMMON_KEYS, "species", "B", "intensity", "stark", "laser_2052", "laser_650", "gamma", "beta", "secular_cutoff", \
      "delta", "tones", "steady"

std::string output_name(const Scenario& s) {
  const ConfigNode root = s.root();
  return root.has("output") ? root["output"].string() : s.command + ".csv";
}

SteadyStateOptions steady_options(const Scenario& s) {
  SteadyStateOptions o;
  const ConfigNode root = s.root();
  if (!root.has("steady")) return o;
  const ConfigNode st = root["steady"];
  st.only({"f_estimate", "drift_tolerance", "max_time", "allow_floquet"});
  if (st.has("f_estimate")) o.f_estimate = st["f_estimate"].number();
  if (st.has("drift_tolerance")) o.drift_tolerance = st["drift_tolerance"].number();
  if (st.has("max_time")) o.max_time = st["max_time"].quantity(Dimension::Time);
  if (st.has("allow_floquet")) o.allow_floquet = st["allow_floquet"].boolean();
  if (!(o.f_estimate > 0.0)) st["f_estimate"].fail("must be positive");
  return o;
}

std::vector<double> angular_grid(const ConfigNode& node) {
  auto g = node.grid(Dimension::Frequency);
  for (double& v : g) v *= units::two_pi;
  return g;
}

// Local maxima and minima of a sampled curve (interior points only).
json extrema(const std::vector<double>& x, const std::vector<double>& y, bool maxima) {
  json out = json::array();
  for (std::size_t k = 1; k + 1 < y.size(); ++k) {
    const bool hit = maxima ? (y[k] > y[k - 1] && y[k] > y[k + 1]) : (y[k] < y[k - 1] && y[k] < y[k + 1]);
    if (hit) out.push_back({{"delta_MHz", to_mhz(x[k])}, {"population", y[k]}});
  }
  return out;
}

CommandResult polarizability_cmd(const Scenario& s) {
  const ConfigNode root = s.root();
  root.only({COMMON_KEYS, "species", "stark", "levels", "resonance_guard"});
  const std::string file = root["species"].string();
  const Species sp = load_species(s.resolve_species(file));
  const LaserField field = stark_field(s);
  PolarizabilityOptions opts;
  if (root.has("resonance_guard")) opts.resonance_guard_hz = root["resonance_guard"].quantity(Dimension::Frequency);
  CsvTable t({"level", "J", "alpha_scalar_au", "alpha_tensor_au"});
  json summary = json::object();
  for (const auto& label : root["levels"].string_list()) {
    const auto a = dynamic_polarizability(sp, label, field.angular_frequency(), opts);
    const double sc = a.scalar, te = a.tensor;
    t.add_row({label, sp.level(label).j.str(), num(sc), num(te)});
    summary[label] = {{"scalar_au", sc}, {"tensor_au", te}};
  }
  return {output_name(s), t.render(s.command, s, {file}), summary};
}

CommandResult levels_cmd(const Scenario& s) {
  const ConfigNode root = s.root();
  root.only({COMMON_KEYS, "species", "B", "stark", "intensity_grid", "levels"});
  const std::string file = root["species"].string();
  const Species sp = load_species(s.resolve_species(file));
  const double b = root["B"].quantity(Dimension::MagneticField);
  const LaserField field = stark_field(s);
  const auto grid = root["intensity_grid"].grid(Dimension::Intensity);
  const auto labels = root["levels"].string_list();

  std::vector<std::string> columns{"intensity_MW_cm2"};
  std::vector<ShiftCurves> curves;
  json summary = json::object();
  for (const auto& label : labels) {
    curves.push_back(shift_curves(sp, label, b, grid, field));
    const std::size_t n = curves.back().energies.empty() ? 0 : curves.back().energies[0].size();
    for (std::size_t k = 0; k < n; ++k) columns.push_back(label + "[" + std::to_string(k) + "]_MHz");
    if (!grid.empty()) {
      const auto& first = curves.back().energies[0];
      json spacing = json::array();
      for (std::size_t k = 1; k < first.size(); ++k) spacing.push_back((first[k] - first[k - 1]) / mhz);
      summary[label] = {{"first_row_spacing_MHz", spacing}};
    }
  }
  CsvTable t(columns);
  for (std::size_t r = 0; r < grid.size(); ++r) {
    std::vector<std::string> row{num(grid[r] / units::mw_per_cm2)};
    for (const auto& c : curves) {
      for (double e : c.energies[r]) row.push_back(num(e / mhz));
    }
    t.add_row(std::move(row));
  }
  return {output_name(s), t.render(s.command, s, {file}), summary};
}

CommandResult scan650_cmd(const Scenario& s) {
  const ConfigNode root = s.root();
  root.only({CYCLING_KEYS, "grids"});
  const CyclingConfig c = cycling_config(s);
  const ConfigNode g = root["grids"];
  g.only({"rabi_650", "detuning_650", "delta"});
  const auto rabi = angular_grid(g["rabi_650"]);
  const auto det = angular_grid(g["detuning_650"]);
  const auto delta = angular_grid(g["delta"]);
  const Map650 map = scan_650(c, rabi, det, delta, steady_options(s));

  CsvTable t({"rabi_650_MHz", "detuning_650_MHz", "p_population", "best_delta_MHz"});
  for (std::size_t i = 0; i < rabi.size(); ++i) {
    for (std::size_t j = 0; j < det.size(); ++j) {
      const std::size_t cell = i * det.size() + j;
      t.add_row({num(to_mhz(rabi[i])), num(to_mhz(det[j])), num(map.population[cell]), num(to_mhz(map.best_delta[cell]))});
    }
  }
  json summary = {{"max_population", map.max_population},
                  {"argmax_rabi_650_MHz", to_mhz(map.argmax_rabi)},
                  {"argmax_detuning_650_MHz", to_mhz(map.argmax_detuning)},
                  {"argmax_delta_MHz", to_mhz(map.argmax_delta)}};
  return {output_name(s), t.render(s.command, s, {root["species"].string()}), summary};
}

CommandResult sideband_cmd(const Scenario& s) {
  const ConfigNode root = s.root();
  root.only({CYCLING_KEYS, "grids"});
  const CyclingConfig c = cycling_config(s);
  const ConfigNode g = root["grids"];
  g.only({"delta"});
  const auto delta = angular_grid(g["delta"]);
  const SidebandCurve curve = scan_sideband(c, delta, steady_options(s));

  CsvTable t({"delta_MHz", "p_population"});
  double best = 0.0, arg = 0.0;
  for (std::size_t k = 0; k < delta.size(); ++k) {
    t.add_row({num(to_mhz(delta[k])), num(curve.population[k])});
    if (curve.population[k] > best) {
      best = curve.population[k];
      arg = delta[k];
    }
  }
  json summary = {{"max_population", best},
                  {"argmax_delta_MHz", to_mhz(arg)},
                  {"peaks", extrema(delta, curve.population, true)},
                  {"dips", extrema(delta, curve.population, false)}};
  return {output_name(s), t.render(s.command, s, {root["species"].string()}), summary};
}

CommandResult reset_cmd(const Scenario& s) {
  const ConfigNode root = s.root();
  root.only({CYCLING_KEYS, "reset"});
  const CyclingConfig c = cycling_config(s);
  const ConfigNode r = root["reset"];
  r.only({"duration", "sample_interval", "max_residual"});
  const double duration = r["duration"].quantity(Dimension::Time);
  const double sample = r["sample_interval"].quantity(Dimension::Time);
  const double max_residual = r.has("max_residual") ? r["max_residual"].number() : 0.02;
  const ResetResult res = simulate_reset(c, duration, sample, max_residual);

  CsvTable t({"time_us", "target_population", "fit_target_population"});
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    const double fit = 1.0 - res.amplitude * std::exp(-res.times[k] / res.tau);
    t.add_row({num(res.times[k] * 1e6), num(res.target_population[k]), num(fit)});
  }
  json summary = {{"tau_us", res.tau * 1e6}, {"amplitude", res.amplitude}, {"fit_rms_residual", res.residual}};
  return {output_name(s), t.render(s.command, s, {root["species"].string()}), summary};
}

ErrorScenario error_scenario(const ConfigNode& root) {
  ErrorScenario e;
  if (root.has("spacing")) e.d = root["spacing"].quantity(Dimension::Length);
  if (root.has("wavelength")) e.lambda = root["wavelength"].quantity(Dimension::Length);
  if (root.has("f")) e.f = root["f"].number();
  if (root.has("beta")) e.beta = root["beta"].number();
  if (root.has("gamma")) e.gamma = units::two_pi * root["gamma"].quantity(Dimension::Frequency);
  if (root.has("omega_2052")) e.omega_2052 = units::two_pi * root["omega_2052"].quantity(Dimension::Frequency);
  if (root.has("omega_650")) e.omega_650 = units::two_pi * root["omega_650"].quantity(Dimension::Frequency);
  if (root.has("detuning_650")) e.detuning_650 = units::two_pi * root["detuning_650"].quantity(Dimension::Frequency);
  try {
    e.validate();
  } catch (const ConfigError& err) {
    root.fail(err.what());
  }
  return e;
}

CommandResult error_budget_cmd(const Scenario& s) {
  const ConfigNode root = s.root();
  root.only({COMMON_KEYS, "species", "B", "stark", "intensity_grid", "t_mcmr", "spacing", "wavelength", "f", "beta",
             "gamma", "omega_2052", "omega_650", "detuning_650", "delta_p_per_intensity"});
  const std::string file = root["species"].string();
  const Species sp = load_species(s.resolve_species(file));
  const auto grid = root["intensity_grid"].grid(Dimension::Intensity);
  const auto times = root["t_mcmr"].quantity_list(Dimension::Time);
  double override_p = std::numeric_limits<double>::quiet_NaN();
  if (root.has("delta_p_per_intensity")) {
    // Given as the P shift at 1 MW/cm2.
    override_p = root["delta_p_per_intensity"].quantity(Dimension::Frequency) / units::mw_per_cm2;
  }
  const auto rows = total_error_curve(sp, grid, times, error_scenario(root), root["B"].quantity(Dimension::MagneticField),
                                      stark_field(s), override_p);

  std::vector<std::string> columns{"intensity_MW_cm2", "delta_S_MHz", "delta_P_MHz", "delta_D_min_MHz",
                                   "absorption_rate_per_s", "scattering_rate_per_s", "far_detuned"};
  for (double t : times) {
    const std::string tag = "_" + num(t * 1e6) + "us";
    for (const char* col : {"absorption_error", "scattering_error", "total_error"}) columns.push_back(col + tag);
  }
  CsvTable t(columns);
  json summary = json::array();
  for (const auto& r : rows) {
    std::vector<std::string> row{num(r.intensity / units::mw_per_cm2), num(r.delta_s_hz / mhz), num(r.delta_p_hz / mhz),
                                 num(r.delta_d_min_hz / mhz), num(r.absorption_rate), num(r.scattering_rate),
                                 r.far_detuned ? "1" : "0"};
    json budgets = json::array();
    for (std::size_t k = 0; k < r.budgets.size(); ++k) {
      const auto& b = r.budgets[k];
      row.push_back(num(b.absorption_error));
      row.push_back(num(b.scattering_error));
      row.push_back(num(b.total_error));
      budgets.push_back({{"t_mcmr_us", times[k] * 1e6}, {"total_error", b.total_error}});
    }
    t.add_row(std::move(row));
    summary.push_back({{"intensity_MW_cm2", r.intensity / units::mw_per_cm2}, {"delta_S_MHz", r.delta_s_hz / mhz},
                       {"budgets", budgets}});
  }
  return {output_name(s), t.render(s.command, s, {file}), summary};
}

CollectionChain read_chain(const ConfigNode& node) {
  node.only({"lens", "fiber", "detector"});
  CollectionChain c;
  c.eps_lens = node["lens"].number();
  c.eps_fiber = node["fiber"].number();
  c.eps_detector = node["detector"].number();
  return c;
}

CommandResult detection_cmd(const Scenario& s) {
  const ConfigNode root = s.root();
  root.only({COMMON_KEYS, "chain", "f", "beta", "gamma", "reference"});
  const CollectionChain chain = read_chain(root["chain"]);
  const double f = root["f"].number(), beta = root["beta"].number();
  const double gamma = units::two_pi * root["gamma"].quantity(Dimension::Frequency);
  const ConfigNode r = root["reference"];
  r.only({"time", "f", "beta", "gamma", "chain"});
  DetectionReference ref;
  ref.time = r["time"].quantity(Dimension::Time);
  ref.f = r["f"].number();
  ref.beta = r["beta"].number();
  ref.gamma = units::two_pi * r["gamma"].quantity(Dimension::Frequency);
  ref.chain = read_chain(r["chain"]);
  const double t = detection_time(chain, f, beta, gamma, ref);
  CsvTable table({"f", "beta", "gamma_MHz", "efficiency", "reference_time_us", "detection_time_us"});
  table.add_row({num(f), num(beta), num(to_mhz(gamma)), num(chain.efficiency()), num(ref.time * 1e6), num(t * 1e6)});
  return {output_name(s), table.render(s.command, s, {}), {{"detection_time_us", t * 1e6}}};
}

CommandResult fidelity_cmd(const Scenario& s) {
  const ConfigNode root = s.root();
  root.only({COMMON_KEYS, "stark_shifts", "deviations", "model"});
  FidelityModel m;
  if (root.has("model")) {
    const ConfigNode n = root["model"];
    n.only({"omega_2052", "omega_650", "beta", "gamma", "efficiency", "window", "threshold"});
    if (n.has("omega_2052")) m.omega_2052 = units::two_pi * n["omega_2052"].quantity(Dimension::Frequency);
    if (n.has("omega_650")) m.omega_650 = units::two_pi * n["omega_650"].quantity(Dimension::Frequency);
    if (n.has("beta")) m.beta = n["beta"].number();
    if (n.has("gamma")) m.gamma = units::two_pi * n["gamma"].quantity(Dimension::Frequency);
    if (n.has("efficiency")) m.efficiency = n["efficiency"].number();
    if (n.has("window")) m.window = n["window"].quantity(Dimension::Time);
    if (n.has("threshold")) m.threshold = n["threshold"].integer();
  }
  const auto shifts = root["stark_shifts"].quantity_list(Dimension::Frequency);
  const ConfigNode devs = root["deviations"];
  CsvTable t({"stark_shift_MHz", "deviation", "p_population", "mean_counts", "fidelity"});
  json summary = json::array();
  for (double shift : shifts) {
    for (std::size_t k = 0; k < devs.size(); ++k) {
      const double dev = devs.at(k).number();
      const auto r = fidelity_with_linewidth(shift, dev, m);
      t.add_row({num(shift / mhz), num(dev), num(r.p_population), num(r.mean_counts), num(r.fidelity)});
      summary.push_back({{"stark_shift_MHz", shift / mhz}, {"deviation", dev}, {"fidelity", r.fidelity}});
    }
  }
  return {output_name(s), t.render(s.command, s, {}), summary};
}

CommandResult dephasing_cmd(const Scenario& s) {
  const ConfigNode root = s.root();
  root.only({COMMON_KEYS, "linewidths", "detunings", "omega_2052"});
  const double omega = units::two_pi * root["omega_2052"].quantity(Dimension::Frequency);
  CsvTable t({"linewidth_kHz", "detuning_MHz", "rabi_2052_kHz", "rms_shift_Hz", "coherence_time_s"});
  json summary = json::array();
  for (double lw : root["linewidths"].quantity_list(Dimension::Frequency)) {
    for (double det : root["detunings"].quantity_list(Dimension::Frequency)) {
      const auto e = dephasing_estimate(lw, det, omega);
      t.add_row({num(lw / 1e3), num(det / mhz), num(omega / units::two_pi / 1e3), num(e.rms_shift_hz),
                 num(e.coherence_time)});
      summary.push_back({{"linewidth_kHz", lw / 1e3},
                         {"detuning_MHz", det / mhz},
                         {"coherence_time_s", e.unbounded ? json("unbounded") : json(e.coherence_time)}});
    }
  }
  return {output_name(s), t.render(s.command, s, {}), summary};
}

#undef CYCLING_KEYS
#undef COMMON_KEYS

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"polarizability", "levels",         "scan-650",
                                              "scan-sideband",  "reset-sim",      "error-budget",
                                              "detection-time", "fidelity-model", "dephasing"};
  return names;
}

CommandResult run_command(const std::string& name, const Scenario& scenario) {
  if (scenario.command != name) {
    throw ConfigError(scenario.origin + ":/command: scenario is for '" + scenario.command + "', not '" + name + "'");
  }
  if (name == "polarizability") return polarizability_cmd(scenario);
  if (name == "levels") return levels_cmd(scenario);
  if (name == "scan-650") return scan650_cmd(scenario);
  if (name == "scan-sideband") return sideband_cmd(scenario);
  if (name == "reset-sim") return reset_cmd(scenario);
  if (name == "error-budget") return error_budget_cmd(scenario);
  if (name == "detection-time") return detection_cmd(scenario);
  if (name == "fidelity-model") return fidelity_cmd(scenario);
  if (name == "dephasing") return dephasing_cmd(scenario);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace ionmcmr
