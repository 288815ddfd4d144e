#pragma once

// The S - D~ - P cycling system of a Ba+ ion under the 532 nm Stark beam,
// multi-tone 2052 nm quadrupole drive and 650 nm repump, plus the scans and
// the reset simulation built on it.

#include <optional>
#include <string>
#include <vector>

#include "ionmcmr/couplings.hpp"

namespace ionmcmr {

/// Reference point for a tone frequency: "S[1]" is dressed state 1 (ascending
/// energy) of manifold S, "D{F=2}" the mean of the F = 2 dressed states and
/// "P" the mean of the whole manifold.
struct StateSelector {
  std::string manifold;
  int index = -1;
  int twice_f = -1;

  static StateSelector parse(const std::string& text);
  std::string str() const;
};

enum class Laser { L2052, L650 };

struct ToneSpec {
  std::string name;
  Laser laser = Laser::L2052;
  StateSelector lower;
  StateSelector upper;
  double detuning = 0.0;       // rad/s, added to the reference transition
  double delta_multiple = 0.0; // the tone sits at reference + detuning + delta_multiple * delta
  double scale = 1.0;          // amplitude relative to Omega0 of its laser
  Envelope envelope;
};

struct CyclingConfig {
  Species species;
  double b_tesla = 0.0;
  LaserField stark;  // 532 nm beam; its geometry fixes the Stark tensor axis
  PolarizationGeometry geom_2052;
  PolarizationGeometry geom_650;
  double rabi_2052_max = 0.0;  // rad/s, largest |Omega_2052^(ij)|
  double rabi_650_max = 0.0;   // rad/s, largest |Omega_650^(ij)|
  double delta = 0.0;          // rad/s, sideband offset
  double gamma = units::two_pi * 20.5e6;
  double beta = 0.73;
  double secular_cutoff = units::two_pi * 100e6;
  std::vector<ToneSpec> tones;
};

struct CyclingSystem {
  DressedManifold s, d, p;
  SystemModel model;
  std::vector<int> p_states;
  double omega0_2052 = 0.0;
  double omega0_650 = 0.0;
};

/// Dressed S, D~ (D3/2) and P (P1/2) manifolds of a species; groups are F for I > 0.
DressedManifold dress_manifold(const Species& species, const std::string& level, const std::string& name,
                               double b_tesla, const LaserField& stark);

CyclingSystem build_cycling_system(const CyclingConfig& config);

struct SteadyPoint {
  double population = 0.0;
  std::string method;
};

SteadyPoint steady_p_population(const CyclingConfig& config, const SteadyStateOptions& options = {});

struct SidebandCurve {
  std::vector<double> delta;  // rad/s
  std::vector<double> population;
};

SidebandCurve scan_sideband(const CyclingConfig& config, const std::vector<double>& delta_grid,
                            const SteadyStateOptions& options = {});

struct Map650 {
  std::vector<double> rabi;       // rad/s
  std::vector<double> detuning;   // rad/s
  std::vector<double> population; // row-major [rabi][detuning], best over the sideband grid
  std::vector<double> best_delta; // rad/s, sideband offset attaining each entry
  double max_population = 0.0;
  double argmax_rabi = 0.0;
  double argmax_detuning = 0.0;
  double argmax_delta = 0.0;
};

/// Steady P population over a (Omega_650, Delta_650) grid; at every point the
/// sideband offset is optimized over `delta_grid`.
Map650 scan_650(const CyclingConfig& config, const std::vector<double>& rabi_grid,
                const std::vector<double>& detuning_grid, const std::vector<double>& delta_grid,
                const SteadyStateOptions& options = {});

struct ResetResult {
  std::vector<double> times;
  std::vector<double> target_population;  // P_0(t)
  double tau = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  // rms deviation of the exponential fit
};

/// Optical pumping from S[1] into S[0]: fits 1 - P_0(t) = A exp(-t/tau).
/// Throws ConvergenceError when no pumping occurs or the decay is not exponential.
ResetResult simulate_reset(const CyclingConfig& config, double duration, double sample_interval,
                           double max_residual = 0.02);

}  // namespace ionmcmr
