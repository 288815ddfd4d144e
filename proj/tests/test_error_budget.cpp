#include <doctest.h>

#include <cmath>
#include <random>

#include "ionmcmr/error_budget.hpp"
#include "ionmcmr/lindblad.hpp"

using namespace ionmcmr;

namespace {

const Species& ba138() {
  static const Species s = load_species(IONMCMR_DATA_DIR "/ba138.json");
  return s;
}

// Absorption rate rewritten as a single fraction in long double:
// R = 3 lambda^2 f beta^3 Gamma^3 / (32 pi^2 d^2 (2 pi Delta)^2).
long double absorption_oracle(long double lambda, long double d, long double f, long double beta, long double gamma,
                              long double delta_hz) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double w = 2.0L * pi * delta_hz;
  return 3.0L * lambda * lambda * f * beta * beta * beta * gamma * gamma * gamma / (32.0L * pi * pi * d * d * w * w);
}

// The ladder as a three-manifold model of the general engine.
SystemModel ladder_model(const ThreeLevel<>& p) {
  SystemModel m;
  m.manifolds = {"S", "D", "P"};
  m.states = {{"S", 0, 0}, {"D", 1, 0}, {"P", 2, 0}};
  m.energies = Eigen::Vector3d(0.0, 0.0, 0.0);
  ComplexMatrix<> one = ComplexMatrix<>::Constant(1, 1, 1.0);
  m.tones.push_back({"2052", 0, 1, one * p.omega_sd, p.d1, {}});
  m.tones.push_back({"650", 1, 2, one * p.omega_dp, p.d2, {}});
  m.collapse.push_back({0, 2, one * std::sqrt(p.beta * p.gamma)});
  m.collapse.push_back({1, 2, one * std::sqrt((1.0 - p.beta) * p.gamma)});
  return m;
}

}  // namespace

TEST_CASE("absorption rate matches the single-fraction form over random parameters") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    ErrorScenario s;
    s.d = 1e-6 + 20e-6 * u(rng);
    s.lambda = 300e-9 + 700e-9 * u(rng);
    s.f = u(rng);
    s.beta = 0.01 + 0.98 * u(rng);
    s.gamma = units::two_pi * (1e6 + 50e6 * u(rng));
    s.delta_s_hz = -1e9 * u(rng);
    s.delta_p_hz = s.delta_s_hz + (u(rng) < 0.5 ? -1.0 : 1.0) * (1e6 + 1e9 * u(rng));
    const long double ref =
        absorption_oracle(s.lambda, s.d, s.f, s.beta, s.gamma, static_cast<long double>(s.delta_p_hz) - s.delta_s_hz);
    if (ref == 0.0L) continue;
    worst = std::max(worst, static_cast<double>(std::abs((photon_absorption_rate(s) - ref) / ref)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("absorption rate limits") {
  ErrorScenario s;
  s.delta_s_hz = -150e6;
  s.delta_p_hz = -7e6;
  const double r = photon_absorption_rate(s);
  s.delta_p_hz = s.delta_s_hz + 2.0 * 143e6;
  CHECK(photon_absorption_rate(s) == doctest::Approx(r / 4.0).epsilon(1e-12));
  s.delta_p_hz = s.delta_s_hz + 1e15;
  CHECK(photon_absorption_rate(s) < 1e-12);
  s.delta_p_hz = s.delta_s_hz;
  CHECK_THROWS_AS(photon_absorption_rate(s), NumericalError);
  s.d = 0.0;
  CHECK_THROWS_AS(photon_absorption_rate(s), ConfigError);
}

TEST_CASE("three-level solver agrees with the general engine") {
  for (double d1 : {0.0, units::two_pi * 3e6, -units::two_pi * 40e6}) {
    for (double d2 : {0.0, units::two_pi * 5e6}) {
      ThreeLevel<> p;
      p.omega_sd = units::two_pi * 2e6;
      p.omega_dp = units::two_pi * 12e6;
      p.d1 = d1;
      p.d2 = d2;
      const double mine = three_level_p_population(p);
      const auto ss = steady_state(ladder_model(p), {2});
      CHECK(ss.method == "static");
      CHECK(std::abs(mine - ss.population) < 1e-6);
    }
  }
}

TEST_CASE("three-level solver in extended precision agrees with double") {
  ThreeLevel<long double> pl;
  pl.omega_sd = units::two_pi * 2e6;
  pl.omega_dp = units::two_pi * 12e6;
  pl.d2 = units::two_pi * 5e6;
  ThreeLevel<> pd{static_cast<double>(pl.omega_sd), static_cast<double>(pl.omega_dp), 0.0,
                  static_cast<double>(pl.d2)};
  CHECK(static_cast<double>(three_level_p_population(pl)) == doctest::Approx(three_level_p_population(pd)).epsilon(1e-10));
}

TEST_CASE("off-resonant scattering") {
  ErrorScenario s;
  s.omega_2052 = 0.0;
  CHECK(off_resonant_scattering_rate(s).rate == 0.0);

  s = ErrorScenario{};
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 20; ++k) {
    const double dac = (10.0 + 4.5 * k) * s.gamma / units::two_pi;
    s.delta_s_hz = 0.0;
    s.delta_d_hz = dac;
    s.delta_p_hz = dac;
    const auto r = off_resonant_scattering_rate(s);
    CHECK(r.far_detuned);
    CHECK(r.rate < previous);
    previous = r.rate;
  }
  // Resonant limit: the undetuned ladder scatters f beta Gamma.
  s = ErrorScenario{};
  s.detuning_650 = 0.0;
  const auto resonant = off_resonant_scattering_rate(s);
  CHECK_FALSE(resonant.far_detuned);
  ThreeLevel<> p;
  p.omega_sd = s.omega_2052;
  p.omega_dp = s.omega_650;
  const auto ss = steady_state(ladder_model(p), {2});
  CHECK(std::abs(resonant.rate / (s.beta * s.gamma) - ss.population) < 1e-6);
}

TEST_CASE("error curve") {
  LaserField stark;
  const std::vector<double> grid{1.0 * units::mw_per_cm2, 3.0 * units::mw_per_cm2, 6.1 * units::mw_per_cm2,
                                 10.0 * units::mw_per_cm2};
  const auto rows = total_error_curve(ba138(), grid, {0.0, 18e-6, 36e-6}, ErrorScenario{}, 4.1 * units::gauss, stark);
  REQUIRE(rows.size() == 4);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].budgets[0].total_error == 0.0);
    CHECK(rows[k].budgets[1].absorption_error == doctest::Approx(0.5 * rows[k].budgets[2].absorption_error));
    CHECK(rows[k].budgets[1].scattering_error == doctest::Approx(0.5 * rows[k].budgets[2].scattering_error));
    CHECK(rows[k].scattering_rate > 0.0);
    CHECK(std::isfinite(rows[k].scattering_rate));
    CHECK(rows[k].delta_d_min_hz > 0.0);
    if (k > 0) CHECK(rows[k].absorption_rate < rows[k - 1].absorption_rate);
  }
  // At 6.1 MW/cm2 the S shift exceeds 150 MHz.
  CHECK(rows[2].delta_s_hz < -150e6);
  CHECK(rows[2].budgets[2].total_error < 1e-3);
}

TEST_CASE("detection time") {
  CollectionChain chain;
  DetectionReference ref;
  const double t = detection_time(chain, 0.04, 0.732, units::two_pi * 20.5e6, ref);
  CHECK(t == doctest::Approx(11e-6 * (0.1 * 0.995 * 19.6) / (0.04 * 0.732 * 20.5)).epsilon(1e-12));
  CHECK(detection_time(chain, ref.f, ref.beta, ref.gamma, ref) == doctest::Approx(ref.time));
  CHECK(detection_time(chain, 0.08, 0.732, units::two_pi * 20.5e6, ref) == doctest::Approx(0.5 * t));
  CHECK_THROWS_AS(detection_time(chain, 0.0, 0.732, 1.0, ref), NumericalError);
  chain.eps_lens = 0.0;
  CHECK_THROWS_AS(detection_time(chain, 0.04, 0.732, 1.0, ref), ConfigError);
}

TEST_CASE("fidelity model") {
  const auto clean = fidelity_with_linewidth(1.5e6, 0.0);
  const auto noisy = fidelity_with_linewidth(1.5e6, 0.12);
  CHECK(clean.fidelity > noisy.fidelity);
  CHECK(fidelity_with_linewidth(3.6e6, 0.0).fidelity == doctest::Approx(clean.fidelity).epsilon(1e-12));
  CHECK(fidelity_with_linewidth(3.6e6, 0.17).fidelity < fidelity_with_linewidth(3.6e6, 0.12).fidelity);
  // Poisson tail written out: P(N > 2) = 1 - e^-mu (1 + mu + mu^2 / 2).
  const double mu = noisy.mean_counts;
  CHECK(noisy.fidelity == doctest::Approx(1.0 - std::exp(-mu) * (1.0 + mu + 0.5 * mu * mu)).epsilon(1e-12));
  CHECK_THROWS_AS(fidelity_with_linewidth(1.5e6, 1.5), ConfigError);
}

TEST_CASE("dephasing estimate") {
  const double omega = units::two_pi * 100e3;
  const auto e = dephasing_estimate(2e3, 12e6, omega);
  CHECK(e.rms_shift_hz == doctest::Approx(1e10 / (4.0 * 144e12) * 2e3).epsilon(1e-12));
  CHECK(dephasing_estimate(4e3, 12e6, omega).coherence_time == doctest::Approx(0.5 * e.coherence_time));
  const auto zero = dephasing_estimate(0.0, 12e6, omega);
  CHECK(zero.unbounded);
  CHECK(std::isinf(zero.coherence_time));
  CHECK_THROWS_AS(dephasing_estimate(2e3, 0.5e6, omega), NumericalError);
}
