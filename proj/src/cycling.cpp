#include "ionmcmr/cycling.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "ionmcmr/error.hpp"
#include "ionmcmr/parallel.hpp"

namespace ionmcmr {

namespace {

constexpr int manifold_s = 0, manifold_d = 1, manifold_p = 2;

const DressedManifold& manifold_by_name(const CyclingSystem& sys, const std::string& name) {
  if (name == sys.s.name) return sys.s;
  if (name == sys.d.name) return sys.d;
  if (name == sys.p.name) return sys.p;
  throw ConfigError("tone references unknown manifold '" + name + "'");
}

double selector_energy(const DressedManifold& m, const StateSelector& sel) {
  const auto& e = m.levels.energies;
  if (sel.index >= 0) {
    if (sel.index >= e.size()) throw ConfigError("state selector " + sel.str() + " is out of range");
    return e[sel.index];
  }
  double sum = 0.0;
  int n = 0;
  for (int k = 0; k < e.size(); ++k) {
    if (sel.twice_f >= 0 && m.groups[k] != sel.twice_f) continue;
    sum += e[k];
    ++n;
  }
  if (n == 0) throw ConfigError("state selector " + sel.str() + " matches no dressed state");
  return sum / n;
}

int parse_int(std::string_view s, const std::string& whole) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("malformed state selector '" + whole + "'");
  return v;
}

}  // namespace

StateSelector StateSelector::parse(const std::string& text) {
  StateSelector sel;
  const auto bracket = text.find_first_of("[{");
  sel.manifold = text.substr(0, bracket);
  if (sel.manifold.empty()) throw ConfigError("malformed state selector '" + text + "'");
  if (bracket == std::string::npos) return sel;
  if (text.back() != (text[bracket] == '[' ? ']' : '}')) throw ConfigError("malformed state selector '" + text + "'");
  const std::string inner = text.substr(bracket + 1, text.size() - bracket - 2);
  if (text[bracket] == '[') {
    sel.index = parse_int(inner, text);
  } else {
    if (inner.rfind("F=", 0) != 0) throw ConfigError("malformed state selector '" + text + "'");
    sel.twice_f = HalfInteger::parse(inner.substr(2)).twice();
  }
  return sel;
}

std::string StateSelector::str() const {
  if (index >= 0) return manifold + "[" + std::to_string(index) + "]";
  if (twice_f >= 0) return manifold + "{F=" + HalfInteger::from_twice(twice_f).str() + "}";
  return manifold;
}

DressedManifold dress_manifold(const Species& species, const std::string& level, const std::string& name,
                               double b_tesla, const LaserField& stark) {
  const auto h = manifold_hamiltonian(species, level, b_tesla, stark);
  DressedManifold m;
  m.name = name;
  m.levels = diagonalize(h.matrix, h.basis);
  for (int k = 0; k < m.levels.size(); ++k) {
    const bool hyperfine = species.nuclear_spin.twice() > 0;
    const HalfInteger f = hyperfine ? dominant_f(m.levels, k) : h.basis.j;
    m.groups.push_back(hyperfine ? f.twice() : 0);
    std::string label = name + "[" + std::to_string(k) + "]";
    if (hyperfine) label += " F=" + f.str();
    m.labels.push_back(label);
  }
  return m;
}

CyclingSystem build_cycling_system(const CyclingConfig& config) {
  CyclingSystem sys;
  sys.s = dress_manifold(config.species, "6S1/2", "S", config.b_tesla, config.stark);
  sys.d = dress_manifold(config.species, "5D3/2", "D", config.b_tesla, config.stark);
  sys.p = dress_manifold(config.species, "6P1/2", "P", config.b_tesla, config.stark);

  SystemModel& model = sys.model;
  model.manifolds = {"S", "D", "P"};
  model.secular_cutoff = config.secular_cutoff;
  const int dim = sys.s.levels.size() + sys.d.levels.size() + sys.p.levels.size();
  model.energies.resize(dim);
  int n = 0;
  for (const DressedManifold* m : {&sys.s, &sys.d, &sys.p}) {
    const int idx = static_cast<int>(&*m == &sys.s ? manifold_s : (&*m == &sys.d ? manifold_d : manifold_p));
    for (int k = 0; k < m->levels.size(); ++k, ++n) {
      model.states.push_back({m->labels[k], idx, m->groups[k]});
      model.energies[n] = units::two_pi * m->levels.energies[k];
      if (idx == manifold_p) sys.p_states.push_back(n);
    }
  }

  const ComplexMatrix<> m2052 = coupling_matrix(sys.d, sys.s, 2, config.geom_2052);
  const ComplexMatrix<> m650 = coupling_matrix(sys.p, sys.d, 1, config.geom_650);
  sys.omega0_2052 = max_abs(m2052) > 0.0 ? config.rabi_2052_max / max_abs(m2052) : 0.0;
  sys.omega0_650 = max_abs(m650) > 0.0 ? config.rabi_650_max / max_abs(m650) : 0.0;

  for (const auto& spec : config.tones) {
    if (spec.scale < 0.0) throw ConfigError("tone '" + spec.name + "' has a negative amplitude scale");
    const bool quadrupole = spec.laser == Laser::L2052;
    const DressedManifold& lower = manifold_by_name(sys, spec.lower.manifold);
    const DressedManifold& upper = manifold_by_name(sys, spec.upper.manifold);
    const std::string want_lower = quadrupole ? "S" : "D", want_upper = quadrupole ? "D" : "P";
    if (lower.name != want_lower || upper.name != want_upper) {
      throw ConfigError("tone '" + spec.name + "' must reference " + want_lower + " -> " + want_upper);
    }
    DriveTone tone;
    tone.name = spec.name;
    tone.lower = quadrupole ? manifold_s : manifold_d;
    tone.upper = quadrupole ? manifold_d : manifold_p;
    tone.rabi = (quadrupole ? sys.omega0_2052 * rabi_2052(sys.d, sys.s, 1.0, config.geom_2052)
                            : sys.omega0_650 * rabi_650(sys.p, sys.d, 1.0, config.geom_650)) *
                spec.scale;
    tone.frequency = units::two_pi * (selector_energy(upper, spec.upper) - selector_energy(lower, spec.lower)) +
                     spec.detuning + spec.delta_multiple * config.delta;
    tone.envelope = spec.envelope;
    model.tones.push_back(std::move(tone));
  }
  model.collapse = collapse_operators(sys.s, sys.d, sys.p, config.gamma, config.beta);
  model.validate();
  return sys;
}

SteadyPoint steady_p_population(const CyclingConfig& config, const SteadyStateOptions& options) {
  const CyclingSystem sys = build_cycling_system(config);
  SteadyStateOptions opts = options;
  opts.beta_gamma = config.beta * config.gamma;
  const SteadyState ss = steady_state(sys.model, sys.p_states, opts);
  return {ss.population, ss.method};
}

SidebandCurve scan_sideband(const CyclingConfig& config, const std::vector<double>& delta_grid,
                            const SteadyStateOptions& options) {
  SidebandCurve curve;
  curve.delta = delta_grid;
  curve.population.assign(delta_grid.size(), 0.0);
  parallel_for(delta_grid.size(), [&](std::size_t k) {
    CyclingConfig c = config;
    c.delta = delta_grid[k];
    try {
      curve.population[k] = steady_p_population(c, options).population;
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " [sideband grid point " << k << ", delta/2pi = " << delta_grid[k] / units::two_pi << " Hz]";
      if (e.category() == ErrorCategory::Convergence) throw ConvergenceError(msg.str());
      throw NumericalError(msg.str());
    }
  });
  return curve;
}

Map650 scan_650(const CyclingConfig& config, const std::vector<double>& rabi_grid,
                const std::vector<double>& detuning_grid, const std::vector<double>& delta_grid,
                const SteadyStateOptions& options) {
  Map650 map;
  map.rabi = rabi_grid;
  map.detuning = detuning_grid;
  const std::size_t nr = rabi_grid.size(), nd = detuning_grid.size();
  map.population.assign(nr * nd, 0.0);
  map.best_delta.assign(nr * nd, 0.0);
  if (delta_grid.empty() && nr * nd > 0) throw ConfigError("scan-650 needs a non-empty sideband grid");
  parallel_for(nr * nd, [&](std::size_t cell) {
    const std::size_t i = cell / nd, j = cell % nd;
    CyclingConfig c = config;
    c.rabi_650_max = rabi_grid[i];
    for (auto& t : c.tones) {
      if (t.laser == Laser::L650) t.detuning = detuning_grid[j];
    }
    double best = -1.0, arg = 0.0;
    for (double delta : delta_grid) {
      c.delta = delta;
      double p = 0.0;
      try {
        p = steady_p_population(c, options).population;
      } catch (const Error& e) {
        std::ostringstream msg;
        msg << e.what() << " [grid point rabi/2pi = " << rabi_grid[i] / units::two_pi
            << " Hz, detuning/2pi = " << detuning_grid[j] / units::two_pi << " Hz]";
        if (e.category() == ErrorCategory::Convergence) throw ConvergenceError(msg.str());
        throw NumericalError(msg.str());
      }
      if (p > best) {
        best = p;
        arg = delta;
      }
    }
    map.population[cell] = best;
    map.best_delta[cell] = arg;
  });
  for (std::size_t cell = 0; cell < nr * nd; ++cell) {
    if (map.population[cell] > map.max_population) {
      map.max_population = map.population[cell];
      map.argmax_rabi = rabi_grid[cell / nd];
      map.argmax_detuning = detuning_grid[cell % nd];
      map.argmax_delta = map.best_delta[cell];
    }
  }
  return map;
}

ResetResult simulate_reset(const CyclingConfig& config, double duration, double sample_interval,
                           double max_residual) {
  const CyclingSystem sys = build_cycling_system(config);
  const int dim = sys.model.dim();
  if (sys.s.levels.size() < 2) throw ConfigError("reset needs two ground states");
  const int target = 0, source = 1;
  DensityMatrix rho0 = DensityMatrix::Zero(dim, dim);
  rho0(source, source) = 1.0;

  const RotatingFrame frame = rotating_frame(sys.model);
  Trajectory traj;
  if (frame.is_static()) {
    traj = evolve_exact(sys.model, rho0, duration, sample_interval);
  } else {
    EvolveOptions opts;
    opts.sample_interval = sample_interval;
    traj = evolve(sys.model, rho0, duration, opts);
  }

  ResetResult out;
  out.times = traj.times;
  std::vector<double> y;
  for (const auto& rho : traj.states) {
    out.target_population.push_back(rho(target, target).real());
    y.push_back(1.0 - rho(target, target).real());
  }
  if (y.size() < 3 || y.back() > 0.99 * y.front()) {
    throw ConvergenceError("reset: no optical pumping into the target state (tau unbounded)");
  }

  // For fixed tau the best amplitude is linear; scan log(tau) by golden section.
  auto fit = [&](double tau, double& amp) {
    double sye = 0.0, see = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double e = std::exp(-out.times[k] / tau);
      sye += y[k] * e;
      see += e * e;
    }
    amp = sye / see;
    double ss = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double r = y[k] - amp * std::exp(-out.times[k] / tau);
      ss += r * r;
    }
    return std::sqrt(ss / y.size());
  };
  double lo = std::log(sample_interval * 0.1), hi = std::log(duration * 100.0);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo), amp = 0.0;
  double fa = fit(std::exp(a), amp), fb = fit(std::exp(b), amp);
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = fit(std::exp(a), amp);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = fit(std::exp(b), amp);
    }
  }
  out.tau = std::exp(0.5 * (lo + hi));
  out.residual = fit(out.tau, out.amplitude);
  if (out.tau > 10.0 * duration) throw ConvergenceError("reset: decay too slow to fit within the simulated time");
  if (out.residual > max_residual) {
    std::ostringstream msg;
    msg << "reset: dynamics not exponential (rms residual " << out.residual << "); raw curve has " << y.size()
        << " samples";
    throw ConvergenceError(msg.str());
  }
  return out;
}

}  // namespace ionmcmr
