#pragma once

// Data-qubit error estimates during a measurement on a neighbouring ion,
// detection-time scaling, a linewidth-broadened fidelity model and a Ramsey
// dephasing estimate. Frequencies named *_hz are cyclic; everything else is
// angular.

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "ionmcmr/atomic_data.hpp"
#include "ionmcmr/error.hpp"
#include "ionmcmr/units.hpp"

namespace ionmcmr {

struct ErrorScenario {
  double d = 4e-6;              // ion spacing, m
  double lambda = 493.545e-9;   // scattered wavelength, m
  double f = 0.04;              // excited-state fraction of the measured ion
  double beta = 0.73;
  double gamma = units::two_pi * 20.5e6;
  double delta_s_hz = 0.0;
  double delta_p_hz = 0.0;
  double delta_d_hz = 0.0;
  double omega_2052 = units::two_pi * 2e6;
  double omega_650 = units::two_pi * 12e6;
  double detuning_650 = units::two_pi * 5e6;  // repump offset used on the measured ion
  double t_mcmr = 36e-6;

  double delta_ac_hz() const { return delta_d_hz - delta_s_hz; }
  /// Throws ConfigError on unphysical values.
  void validate() const;
};

struct ErrorBudget {
  double absorption_error = 0.0;
  double scattering_error = 0.0;
  double total_error = 0.0;
  bool capped = false;
};

/// Resonant 493 nm absorption rate on the data qubit,
/// R = 3 lambda^2 / (8 pi^2 d^2) f beta Gamma (beta Gamma / 2 / (delta_P - delta_S))^2.
/// Throws NumericalError when delta_P = delta_S.
double photon_absorption_rate(const ErrorScenario& s);

/// Parameters of the S - D - P ladder: tones drive S-D and D-P; the rotating
/// frame places D at -d1 and P at -(d1 + d2). P decays to S at beta Gamma and
/// to D at (1 - beta) Gamma; `dephasing` adds sqrt(2 gamma_D) |D><D|.
template <typename Scalar = double>
struct ThreeLevel {
  Scalar omega_sd = 0, omega_dp = 0;
  Scalar d1 = 0, d2 = 0;
  Scalar gamma = Scalar(units::two_pi * 20.5e6);
  Scalar beta = Scalar(0.73);
  Scalar dephasing = 0;
};

/// Steady state of the ladder from its optical Bloch equations.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, 3, 3> three_level_steady_state(const ThreeLevel<Scalar>& p) {
  using C = std::complex<Scalar>;
  using M3 = Eigen::Matrix<C, 3, 3>;
  const C i(0, 1);
  M3 h = M3::Zero();
  h(1, 1) = -p.d1;
  h(2, 2) = -(p.d1 + p.d2);
  h(0, 1) = h(1, 0) = p.omega_sd / Scalar(2);
  h(1, 2) = h(2, 1) = p.omega_dp / Scalar(2);
  const Scalar g_s = p.beta * p.gamma, g_d = (Scalar(1) - p.beta) * p.gamma;

  // drho/dt written out element by element.
  auto rhs = [&](const M3& r) {
    M3 out = -i * (h * r - r * h);
    out(0, 0) += g_s * r(2, 2).real();
    out(1, 1) += g_d * r(2, 2).real();
    for (int a = 0; a < 3; ++a) {
      out(2, a) -= Scalar(0.5) * p.gamma * r(2, a);
      out(a, 2) -= Scalar(0.5) * p.gamma * r(a, 2);
      if (a != 1) {
        out(1, a) -= p.dephasing * r(1, a);
        out(a, 1) -= p.dephasing * r(a, 1);
      }
    }
    return out;
  };
  // Real unknowns: populations, then Re/Im of the three coherences.
  auto unpack = [](const Eigen::Matrix<Scalar, 9, 1>& x) {
    M3 r;
    r(0, 0) = x[0];
    r(1, 1) = x[1];
    r(2, 2) = x[2];
    r(0, 1) = C(x[3], x[4]);
    r(0, 2) = C(x[5], x[6]);
    r(1, 2) = C(x[7], x[8]);
    r(1, 0) = std::conj(r(0, 1));
    r(2, 0) = std::conj(r(0, 2));
    r(2, 1) = std::conj(r(1, 2));
    return r;
  };
  auto pack = [](const M3& r) {
    Eigen::Matrix<Scalar, 9, 1> x;
    x << r(0, 0).real(), r(1, 1).real(), r(2, 2).real(), r(0, 1).real(), r(0, 1).imag(), r(0, 2).real(),
        r(0, 2).imag(), r(1, 2).real(), r(1, 2).imag();
    return x;
  };
  Eigen::Matrix<Scalar, 9, 9> a;
  for (int k = 0; k < 9; ++k) a.col(k) = pack(rhs(unpack(Eigen::Matrix<Scalar, 9, 1>::Unit(k))));
  a.row(0) << 1, 1, 1, 0, 0, 0, 0, 0, 0;
  Eigen::Matrix<Scalar, 9, 1> b = Eigen::Matrix<Scalar, 9, 1>::Zero();
  b[0] = 1;
  Eigen::FullPivLU<Eigen::Matrix<Scalar, 9, 9>> lu(a);
  if (!lu.isInvertible()) throw NumericalError("three-level steady state is not unique");
  return unpack(lu.solve(b));
}

/// Steady P population of the ladder.
template <typename Scalar = double>
Scalar three_level_p_population(const ThreeLevel<Scalar>& p) {
  return three_level_steady_state(p)(2, 2).real();
}

struct ScatteringRate {
  double rate = 0.0;         // 1/s
  double p_population = 0.0;
  bool far_detuned = true;   // |delta_AC| >= 10 Gamma
};

/// Off-resonant P scattering of a data ion exposed to the measurement tones:
/// 2052 nm detuned by -delta_AC and 650 nm by -(delta_P - delta_D) + detuning_650.
ScatteringRate off_resonant_scattering_rate(const ErrorScenario& s);

/// Errors over T_mcmr from both channels, capped at 1.
ErrorBudget error_budget(const ErrorScenario& s);

struct ErrorCurveRow {
  double intensity = 0.0;  // W/m^2
  double delta_s_hz = 0.0, delta_p_hz = 0.0, delta_d_min_hz = 0.0;
  double absorption_rate = 0.0, scattering_rate = 0.0;
  bool far_detuned = true;
  std::vector<ErrorBudget> budgets;  // one per requested T_mcmr
};

/// Stark shifts from the species data at each intensity (delta_D is the
/// smallest shift among the dressed D3/2 states) and the resulting budgets.
/// `delta_p_override_hz_per_wm2`, when finite, replaces the P shift per unit intensity.
std::vector<ErrorCurveRow> total_error_curve(const Species& species, const std::vector<double>& intensity_grid,
                                             const std::vector<double>& t_mcmr, const ErrorScenario& base,
                                             double b_tesla, const LaserField& stark_template,
                                             double delta_p_override_hz_per_wm2 = std::numeric_limits<double>::quiet_NaN());

struct CollectionChain {
  double eps_lens = 0.1;
  double eps_fiber = 1.0;
  double eps_detector = 1.0;

  double efficiency() const { return eps_lens * eps_fiber * eps_detector; }
  void validate() const;
};

struct DetectionReference {
  double time = 11e-6;
  double f = 0.1;
  double beta = 0.995;
  double gamma = units::two_pi * 19.6e6;
  CollectionChain chain;
};

/// T = T_ref R_ref / R with R = eps f beta Gamma.
double detection_time(const CollectionChain& chain, double f, double beta, double gamma,
                      const DetectionReference& reference);

struct FidelityModel {
  double omega_2052 = units::two_pi * 100e3;
  double omega_650 = units::two_pi * 5e6;
  double beta = 0.73;
  double gamma = units::two_pi * 20.5e6;
  double efficiency = 0.01962;  // overall photon detection efficiency
  double window = 9e-3;         // s
  int threshold = 2;            // bright when counts exceed this
};

struct FidelityResult {
  double fidelity = 0.0;
  double p_population = 0.0;
  double mean_counts = 0.0;
};

/// Bright-state detection fidelity when a fractional Stark-shift spread acts
/// as a dephasing rate 2 pi shift deviation on D.
FidelityResult fidelity_with_linewidth(double stark_shift_hz, double fractional_deviation,
                                       const FidelityModel& model = {});

struct DephasingEstimate {
  double rms_shift_hz = 0.0;
  double coherence_time = 0.0;  // s; +inf when the linewidth is zero
  bool unbounded = false;
};

/// First-order propagation of laser frequency noise through the light shift
/// Omega^2 / (4 Delta): rms = (Omega/2pi)^2 / (4 Delta_hz^2) linewidth.
/// Throws NumericalError unless |Delta| >= 10 Omega / 2pi.
DephasingEstimate dephasing_estimate(double linewidth_hz, double detuning_hz, double omega_2052);

}  // namespace ionmcmr
