#include "ionmcmr/error_budget.hpp"

#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "ionmcmr/level_structure.hpp"
#include "ionmcmr/polarizability.hpp"

namespace ionmcmr {

void ErrorScenario::validate() const {
  if (!(d > 0.0)) throw ConfigError("ion spacing must be positive");
  if (!(lambda > 0.0)) throw ConfigError("wavelength must be positive");
  if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("excited-state fraction must lie in [0, 1]");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("branching ratio must lie in (0, 1)");
  if (!(gamma > 0.0)) throw ConfigError("linewidth must be positive");
  if (!std::isfinite(delta_s_hz) || !std::isfinite(delta_p_hz) || !std::isfinite(delta_d_hz)) {
    throw ConfigError("Stark shifts must be finite");
  }
  if (omega_2052 < 0.0 || omega_650 < 0.0) throw ConfigError("Rabi frequencies must be non-negative");
  if (t_mcmr < 0.0) throw ConfigError("measurement time must be non-negative");
}

double photon_absorption_rate(const ErrorScenario& s) {
  s.validate();
  const double detuning = units::two_pi * (s.delta_p_hz - s.delta_s_hz);
  if (detuning == 0.0) throw NumericalError("absorption rate diverges at delta_P = delta_S");
  const double geometric = 3.0 * s.lambda * s.lambda / (8.0 * units::pi * units::pi * s.d * s.d);
  const double bg = s.beta * s.gamma;
  const double ratio = 0.5 * bg / detuning;
  return geometric * s.f * bg * ratio * ratio;
}

ScatteringRate off_resonant_scattering_rate(const ErrorScenario& s) {
  s.validate();
  ThreeLevel<> p;
  p.omega_sd = s.omega_2052;
  p.omega_dp = s.omega_650;
  p.d1 = -units::two_pi * s.delta_ac_hz();
  p.d2 = -units::two_pi * (s.delta_p_hz - s.delta_d_hz) + s.detuning_650;
  p.gamma = s.gamma;
  p.beta = s.beta;
  ScatteringRate out;
  out.p_population = three_level_p_population(p);
  out.rate = out.p_population * s.beta * s.gamma;
  out.far_detuned = std::abs(units::two_pi * s.delta_ac_hz()) >= 10.0 * s.gamma;
  return out;
}

ErrorBudget error_budget(const ErrorScenario& s) {
  ErrorBudget b;
  b.absorption_error = photon_absorption_rate(s) * s.t_mcmr;
  b.scattering_error = off_resonant_scattering_rate(s).rate * s.t_mcmr;
  if (b.absorption_error > 1.0 || b.scattering_error > 1.0) {
    std::cerr << "warning: error probability above 1 capped (rate x time outside the small-error regime)\n";
    b.capped = true;
  }
  b.absorption_error = std::min(b.absorption_error, 1.0);
  b.scattering_error = std::min(b.scattering_error, 1.0);
  b.total_error = std::min(b.absorption_error + b.scattering_error, 1.0);
  return b;
}

std::vector<ErrorCurveRow> total_error_curve(const Species& species, const std::vector<double>& intensity_grid,
                                             const std::vector<double>& t_mcmr, const ErrorScenario& base,
                                             double b_tesla, const LaserField& stark_template,
                                             double delta_p_override_hz_per_wm2) {
  const double omega = stark_template.angular_frequency();
  const auto alpha_s = dynamic_polarizability(species, "6S1/2", omega);
  const auto alpha_p = dynamic_polarizability(species, "6P1/2", omega);

  // D shifts relative to the same dressed state at zero intensity.
  std::vector<double> grid{0.0};
  grid.insert(grid.end(), intensity_grid.begin(), intensity_grid.end());
  const auto curves = shift_curves(species, "5D3/2", b_tesla, grid, stark_template);

  std::vector<ErrorCurveRow> rows;
  for (std::size_t k = 0; k < intensity_grid.size(); ++k) {
    LaserField field = stark_template;
    field.intensity = intensity_grid[k];
    ErrorCurveRow row;
    row.intensity = intensity_grid[k];
    row.delta_s_hz = scalar_shift(alpha_s, field);
    row.delta_p_hz = std::isfinite(delta_p_override_hz_per_wm2) ? delta_p_override_hz_per_wm2 * field.intensity
                                                                 : scalar_shift(alpha_p, field);
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < curves.energies[k + 1].size(); ++n) {
      dmin = std::min(dmin, curves.energies[k + 1][n] - curves.energies[0][n]);
    }
    row.delta_d_min_hz = dmin;

    ErrorScenario s = base;
    s.delta_s_hz = row.delta_s_hz;
    s.delta_p_hz = row.delta_p_hz;
    s.delta_d_hz = row.delta_d_min_hz;
    row.absorption_rate = field.intensity > 0.0 ? photon_absorption_rate(s) : 0.0;
    const auto scattering = off_resonant_scattering_rate(s);
    row.scattering_rate = scattering.rate;
    row.far_detuned = scattering.far_detuned;
    for (double t : t_mcmr) {
      if (t < 0.0) throw ConfigError("measurement time must be non-negative");
      ErrorBudget b;
      b.absorption_error = row.absorption_rate * t;
      b.scattering_error = row.scattering_rate * t;
      b.capped = b.absorption_error > 1.0 || b.scattering_error > 1.0;
      if (b.capped) std::cerr << "warning: error probability above 1 capped at intensity " << row.intensity << " W/m^2\n";
      b.absorption_error = std::min(b.absorption_error, 1.0);
      b.scattering_error = std::min(b.scattering_error, 1.0);
      b.total_error = std::min(b.absorption_error + b.scattering_error, 1.0);
      row.budgets.push_back(b);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void CollectionChain::validate() const {
  for (double e : {eps_lens, eps_fiber, eps_detector}) {
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("collection efficiencies must lie in (0, 1]");
  }
}

double detection_time(const CollectionChain& chain, double f, double beta, double gamma,
                      const DetectionReference& reference) {
  chain.validate();
  reference.chain.validate();
  const double rate = chain.efficiency() * f * beta * gamma;
  const double ref = reference.chain.efficiency() * reference.f * reference.beta * reference.gamma;
  if (!(rate > 0.0) || !(ref > 0.0)) throw NumericalError("detection time undefined for a zero photon rate");
  return reference.time * ref / rate;
}

FidelityResult fidelity_with_linewidth(double stark_shift_hz, double fractional_deviation, const FidelityModel& model) {
  if (!(fractional_deviation >= 0.0 && fractional_deviation < 1.0)) {
    throw ConfigError("fractional deviation must lie in [0, 1)");
  }
  if (model.threshold < 0 || !(model.window > 0.0) || !(model.efficiency > 0.0)) {
    throw ConfigError("detection threshold model is not configured");
  }
  ThreeLevel<> p;
  p.omega_sd = model.omega_2052;
  p.omega_dp = model.omega_650;
  p.gamma = model.gamma;
  p.beta = model.beta;
  p.dephasing = units::two_pi * stark_shift_hz * fractional_deviation;
  FidelityResult out;
  out.p_population = three_level_p_population(p);
  out.mean_counts = model.efficiency * out.p_population * model.beta * model.gamma * model.window;
  if (out.mean_counts <= 0.0) return out;
  const boost::math::poisson_distribution<double> counts(out.mean_counts);
  out.fidelity = boost::math::cdf(boost::math::complement(counts, static_cast<double>(model.threshold)));
  return out;
}

DephasingEstimate dephasing_estimate(double linewidth_hz, double detuning_hz, double omega_2052) {
  if (linewidth_hz < 0.0) throw ConfigError("linewidth must be non-negative");
  const double rabi_hz = omega_2052 / units::two_pi;
  if (!(std::abs(detuning_hz) >= 10.0 * rabi_hz)) {
    throw NumericalError("dephasing estimate needs |detuning| >> Rabi frequency");
  }
  DephasingEstimate out;
  out.rms_shift_hz = rabi_hz * rabi_hz / (4.0 * detuning_hz * detuning_hz) * linewidth_hz;
  if (out.rms_shift_hz == 0.0) {
    out.coherence_time = std::numeric_limits<double>::infinity();
    out.unbounded = true;
  } else {
    out.coherence_time = 1.0 / (units::two_pi * out.rms_shift_hz);
  }
  return out;
}

}  // namespace ionmcmr
