#include <doctest.h>

#include <cmath>

#include "ionmcmr/cycling.hpp"
#include "ionmcmr/error.hpp"
#include "oracles/racah_rational.hpp"

using namespace ionmcmr;

namespace {

const Species& ba138() {
  static const Species s = load_species(IONMCMR_DATA_DIR "/ba138.json");
  return s;
}
const Species& ba137() {
  static const Species s = load_species(IONMCMR_DATA_DIR "/ba137.json");
  return s;
}

LaserField beam(double mw_per_cm2) {
  LaserField f;
  f.intensity = mw_per_cm2 * units::mw_per_cm2;
  return f;
}

ToneSpec tone(const char* name, Laser laser, const char* lower, const char* upper, double detuning_hz = 0.0,
              double multiple = 0.0) {
  ToneSpec t;
  t.name = name;
  t.laser = laser;
  t.lower = StateSelector::parse(lower);
  t.upper = StateSelector::parse(upper);
  t.detuning = units::two_pi * detuning_hz;
  t.delta_multiple = multiple;
  return t;
}

// 138Ba+ at 6.1 MW/cm2 and 4.1 G with a carrier, one sideband and a circular repump.
CyclingConfig cycling138(double rabi650_mhz = 12.0, double det650_mhz = 5.0, double delta_mhz = 33.0) {
  CyclingConfig c;
  c.species = ba138();
  c.b_tesla = 4.1 * units::gauss;
  c.stark = beam(6.1);
  c.geom_2052.epsilon = Eigen::Vector3cd(1, 0, 0);
  c.geom_2052.eta = Eigen::Vector3d(0, 1, 0);
  c.geom_650.epsilon = Eigen::Vector3cd(1, 0, std::complex<double>(0, 1)) / std::sqrt(2.0);
  c.rabi_2052_max = units::two_pi * 2e6;
  c.rabi_650_max = units::two_pi * rabi650_mhz * 1e6;
  c.delta = units::two_pi * delta_mhz * 1e6;
  c.tones = {tone("carrier", Laser::L2052, "S[1]", "D[0]"), tone("sideband", Laser::L2052, "S[1]", "D[0]", 0, 1),
             tone("repump", Laser::L650, "D", "P", det650_mhz * 1e6)};
  return c;
}

ComplexMatrix<> p_block_rate(const std::vector<BlockOperator>& ops, int dim, int p0, int np) {
  ComplexMatrix<> sum = ComplexMatrix<>::Zero(dim, dim);
  for (const auto& l : ops) {
    const auto d = l.dense(dim);
    sum += d.adjoint() * d;
  }
  return sum.block(p0, p0, np, np);
}

double population(const DensityMatrix& rho, const std::vector<int>& idx) {
  double p = 0.0;
  for (int k : idx) p += rho(k, k).real();
  return p;
}

}  // namespace

TEST_CASE("selectors parse and print") {
  CHECK(StateSelector::parse("S[1]").index == 1);
  CHECK(StateSelector::parse("D{F=2}").twice_f == 4);
  CHECK(StateSelector::parse("P").index == -1);
  CHECK(StateSelector::parse("D{F=3/2}").str() == "D{F=3/2}");
  CHECK_THROWS_AS(StateSelector::parse("S[x]"), ConfigError);
  CHECK_THROWS_AS(StateSelector::parse("S{J=1}"), ConfigError);
  CHECK_THROWS_AS(StateSelector::parse("[1]"), ConfigError);
}

TEST_CASE("decay operators sum to the full linewidth on P") {
  const double gamma = units::two_pi * 20.5e6;
  for (const Species* sp : {&ba138(), &ba137()}) {
    auto c = cycling138();
    c.species = *sp;
    const auto sys = build_cycling_system(c);
    const int dim = sys.model.dim(), np = sys.p.levels.size();
    const auto rate = p_block_rate(sys.model.collapse, dim, dim - np, np);
    CHECK((rate - gamma * ComplexMatrix<>::Identity(np, np)).cwiseAbs().maxCoeff() < 1e-6 * gamma);

    // Branching: the S part alone carries beta Gamma.
    std::vector<BlockOperator> to_s;
    for (const auto& l : sys.model.collapse) {
      if (l.row < sys.s.levels.size()) to_s.push_back(l);
    }
    const auto rate_s = p_block_rate(to_s, dim, dim - np, np);
    CHECK((rate_s - 0.73 * gamma * ComplexMatrix<>::Identity(np, np)).cwiseAbs().maxCoeff() < 1e-6 * gamma);
  }
}

TEST_CASE("beta = 1 leaves no jumps into D") {
  auto c = cycling138();
  c.beta = 1.0;
  const auto sys = build_cycling_system(c);
  for (const auto& l : sys.model.collapse) CHECK(l.row < sys.s.levels.size());
}

TEST_CASE("bare-basis couplings reduce to 3j symbols") {
  // Weak field and no Stark beam: the dressed states are the |J m> states in ascending m.
  const double b = 1.0 * units::gauss;
  const auto s = dress_manifold(ba138(), "6S1/2", "S", b, beam(0.0));
  const auto d = dress_manifold(ba138(), "5D3/2", "D", b, beam(0.0));
  const auto p = dress_manifold(ba138(), "6P1/2", "P", b, beam(0.0));

  PolarizationGeometry pi;
  pi.epsilon = Eigen::Vector3cd(0, 0, 1);
  pi.eta = Eigen::Vector3d(1, 0, 0);
  const auto m650 = coupling_matrix(p, d, 1, pi);
  for (int u = 0; u < 2; ++u) {
    for (int l = 0; l < 4; ++l) {
      const int tmu = 2 * u - 1, tml = 2 * l - 3;
      const double w = tmu == tml ? oracle::three_j(1, 2, 3, -tmu, 0, tml).to_double() : 0.0;
      CHECK(std::abs(m650(u, l)) == doctest::Approx(std::abs(w)).epsilon(1e-12));
    }
  }

  // epsilon = eta = z is not transverse, but it is the one geometry with pure q = 0.
  PolarizationGeometry axial;
  axial.epsilon = Eigen::Vector3cd(0, 0, 1);
  axial.eta = Eigen::Vector3d(0, 0, 1);
  const auto m2052 = coupling_matrix(d, s, 2, axial);
  for (int u = 0; u < 4; ++u) {
    for (int l = 0; l < 2; ++l) {
      const int tmu = 2 * u - 3, tml = 2 * l - 1;
      const double w = tmu == tml ? std::sqrt(2.0 / 3.0) * oracle::three_j(3, 4, 1, -tmu, 0, tml).to_double() : 0.0;
      CHECK(std::abs(m2052(u, l)) == doctest::Approx(std::abs(w)).epsilon(1e-12));
    }
  }
  CHECK(max_abs(rabi_2052(d, s, 0.0, axial)) == 0.0);
  CHECK(max_abs(rabi_650(p, d, 0.0, pi)) == 0.0);
}

TEST_CASE("circular repump still reaches every dressed D state") {
  const auto sys = build_cycling_system(cycling138());
  const auto m = coupling_matrix(sys.p, sys.d, 1, cycling138().geom_650);
  for (int k = 0; k < m.cols(); ++k) CHECK(m.col(k).norm() > 0.05);
}

TEST_CASE("free decay from P follows the linewidth and branching") {
  auto c = cycling138();
  c.tones.clear();
  const auto sys = build_cycling_system(c);
  const int dim = sys.model.dim();
  DensityMatrix rho0 = DensityMatrix::Zero(dim, dim);
  rho0(dim - 1, dim - 1) = 1.0;
  const double t = 20e-9;
  const auto traj = evolve(sys.model, rho0, t, {0.0, 5e-9});
  const double gamma = c.gamma;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double p = population(traj.states[k], sys.p_states);
    CHECK(p == doctest::Approx(std::exp(-gamma * traj.times[k])).epsilon(1e-7));
  }
  const auto& rho = traj.states.back();
  const double s = rho(0, 0).real() + rho(1, 1).real();
  CHECK(s / (1.0 - population(rho, sys.p_states)) == doctest::Approx(0.73).epsilon(1e-9));

  // Long times: everything has left P, for either initial P state.
  for (int start : sys.p_states) {
    DensityMatrix r0 = DensityMatrix::Zero(dim, dim);
    r0(start, start) = 1.0;
    const auto end = evolve_exact(sys.model, r0, 2e-6, 2e-6).states.back();
    CHECK(population(end, sys.p_states) < 1e-12);
    CHECK(end(0, 0).real() + end(1, 1).real() == doctest::Approx(0.73).epsilon(1e-9));
  }
}

TEST_CASE("ground state without drives is stationary") {
  auto c = cycling138();
  c.tones.clear();
  const auto sys = build_cycling_system(c);
  const DensityMatrix rho0 = mixed_state(sys.model, 0);
  const auto traj = evolve(sys.model, rho0, 1e-6);
  CHECK((traj.states.back() - rho0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trajectories keep trace, Hermiticity and positivity") {
  const auto sys = build_cycling_system(cycling138());
  const auto traj = evolve(sys.model, mixed_state(sys.model, 0), 3e-6, {0.0, 0.1e-6});
  CHECK(traj.states.size() == 31);
  for (const auto& rho : traj.states) {
    const auto d = diagnose(rho);
    CHECK(d.trace_error < 1e-8);
    CHECK(d.hermiticity_error < 1e-10);
    CHECK(d.min_eigenvalue > -1e-8);
  }
}

TEST_CASE("step size above the resolution limit is rejected") {
  const auto sys = build_cycling_system(cycling138());
  const double limit = max_time_step(rotating_frame(sys.model));
  CHECK_THROWS_AS(evolve(sys.model, mixed_state(sys.model, 0), 1e-7, {2.0 * limit, 0.0}), NumericalError);
}

TEST_CASE("continued fraction and time averaging agree") {
  const auto c = cycling138();
  SteadyStateOptions direct;
  direct.allow_floquet = false;
  for (double delta : {15e6, 33e6}) {
    auto cd = c;
    cd.delta = units::two_pi * delta;
    const auto f = steady_p_population(cd);
    const auto t = steady_p_population(cd, direct);
    CHECK(f.method == "floquet");
    CHECK(t.method == "time-average");
    CHECK(f.population == doctest::Approx(t.population).epsilon(0.02));
  }
}

TEST_CASE("without repump the P population vanishes") {
  auto c = cycling138(0.0);
  const auto sys = build_cycling_system(c);
  const auto traj = evolve(sys.model, mixed_state(sys.model, 0), 100e-6);
  CHECK(population(traj.states.back(), sys.p_states) < 1e-4);
}

TEST_CASE("a sideband far from every resonance leaves the single-tone result") {
  auto single = cycling138();
  single.tones.erase(single.tones.begin() + 1);
  const double base = steady_p_population(single).population;
  const double far = steady_p_population(cycling138(12.0, 5.0, 90.0)).population;
  CHECK(base > 0.0);
  CHECK(far == doctest::Approx(base).epsilon(0.1));
}

TEST_CASE("Blackman slots leave less population in off-target D states than square slots") {
  // Two alternating Delta m = 0 tones at low Stark intensity, no repump.
  auto c = cycling138(0.0);
  c.stark = beam(0.101);
  const double r = 1.0 / std::sqrt(2.0);
  c.geom_2052.epsilon = Eigen::Vector3cd(r, 0, r);
  c.geom_2052.eta = Eigen::Vector3d(-r, 0, r);
  c.rabi_2052_max = units::two_pi * 100e3;
  auto leak = [&](EnvelopeShape shape) {
    auto cc = c;
    cc.tones = {tone("a", Laser::L2052, "S[0]", "D[1]"), tone("b", Laser::L2052, "S[1]", "D[2]")};
    for (int k = 0; k < 2; ++k) cc.tones[k].envelope = {shape, 6e-6, k, 2};
    const auto sys = build_cycling_system(cc);
    const int off = sys.s.levels.size();
    const auto traj = evolve(sys.model, mixed_state(sys.model, 0), 48e-6, {0.0, 6e-6});
    double sum = 0.0;
    for (const auto& rho : traj.states) sum += rho(off, off).real() + rho(off + 3, off + 3).real();
    return sum / traj.states.size();
  };
  const double square = leak(EnvelopeShape::Square), blackman = leak(EnvelopeShape::Blackman);
  MESSAGE("off-target population: square " << square << ", blackman " << blackman);
  CHECK(blackman < square);
}

TEST_CASE("envelopes") {
  Envelope bm{EnvelopeShape::Blackman, 6e-6, 1, 2};
  CHECK(bm(3e-6) == 0.0);
  CHECK(bm(9e-6) == doctest::Approx(1.0));
  double area = 0.0;
  for (int k = 0; k < 1200; ++k) area += bm((k + 0.5) * 1e-8) * 1e-8;
  CHECK(area == doctest::Approx(0.42 * 6e-6).epsilon(1e-6));
  CHECK_THROWS_AS((Envelope{EnvelopeShape::Square, 0.0, 0, 2}.validate()), ConfigError);
  CHECK_THROWS_AS((Envelope{EnvelopeShape::Square, 1e-6, 2, 2}.validate()), ConfigError);
}

TEST_CASE("scan_650 handles empty grids and is order independent") {
  const auto c = cycling138();
  const auto empty = scan_650(c, {}, {}, {units::two_pi * 33e6});
  CHECK(empty.population.empty());

  const std::vector<double> rabi{units::two_pi * 8e6, units::two_pi * 12e6};
  const std::vector<double> det{0.0, units::two_pi * 5e6};
  const std::vector<double> deltas{units::two_pi * 31e6, units::two_pi * 33e6};
  const auto fwd = scan_650(c, rabi, det, deltas);
  const auto rev = scan_650(c, {rabi[1], rabi[0]}, {det[1], det[0]}, {deltas[1], deltas[0]});
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(fwd.population[i * 2 + j] == rev.population[(1 - i) * 2 + (1 - j)]);
  }
  CHECK(fwd.max_population == rev.max_population);
}

TEST_CASE("reset without drives reports no pumping") {
  auto c = cycling138();
  c.tones.clear();
  CHECK_THROWS_AS(simulate_reset(c, 100e-6, 1e-6), ConvergenceError);
}

TEST_CASE("tone references are validated") {
  auto c = cycling138();
  c.tones[0].upper = StateSelector::parse("P");
  CHECK_THROWS_AS(build_cycling_system(c), ConfigError);
  c = cycling138();
  c.tones[0].lower = StateSelector::parse("S[7]");
  CHECK_THROWS_AS(build_cycling_system(c), ConfigError);
}
