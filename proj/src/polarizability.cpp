#include "ionmcmr/polarizability.hpp"

#include <cmath>
#include <sstream>

#include "ionmcmr/error.hpp"

namespace ionmcmr {

std::vector<LineTerm> polarizability_terms(const Species& species, std::string_view level, double omega,
                                           const PolarizabilityOptions& options) {
  const Level& self = species.level(level);
  const HalfInteger j = self.j;
  const double jv = j.value();
  const double scalar_norm = 1.0 / std::sqrt(3.0 * (2.0 * jv + 1.0));
  const double tensor_norm =
      j.twice() >= 2
          ? std::sqrt(10.0 * jv * (2 * jv - 1) / (3.0 * (jv + 1) * (2 * jv + 1) * (2 * jv + 3)))
          : 0.0;

  std::vector<LineTerm> terms;
  for (const auto& line : species.lines) {
    const bool upward = line.lower == self.label;
    if (!upward && line.upper != self.label) continue;
    const Level& partner = species.level(upward ? line.upper : line.lower);
    const HalfInteger jp = partner.j;

    const double w0 = line.angular_frequency();
    if (std::abs(w0 - omega) < units::two_pi * options.resonance_guard_hz) {
      std::ostringstream msg;
      msg << "laser frequency within the resonance guard of line " << line.upper << "-" << line.lower;
      throw NumericalError(msg.str());
    }
    const double strength = 6.0 * units::pi * units::vacuum_permittivity * std::pow(units::speed_of_light, 3) *
                            jp.multiplicity() * line.einstein_a / (w0 * w0 * (w0 * w0 - omega * omega));
    const double sign = upward ? 1.0 : -1.0;
    const int phase = detail::parity_sign((j.twice() + jp.twice()) / 2);

    LineTerm t;
    t.line = &line;
    t.scalar = sign * scalar_norm * -phase * wigner6j(HalfInteger(1), HalfInteger(0), HalfInteger(1), j, jp, j) *
               strength / units::polarizability_au;
    if (tensor_norm != 0.0) {
      t.tensor = sign * tensor_norm * phase * wigner6j(HalfInteger(1), HalfInteger(2), HalfInteger(1), j, jp, j) *
                 strength / units::polarizability_au;
    }
    terms.push_back(t);
  }
  return terms;
}

Polarizability dynamic_polarizability(const Species& species, std::string_view level, double omega,
                                      const PolarizabilityOptions& options) {
  Polarizability alpha;
  alpha.level = std::string(level);
  alpha.omega = omega;
  for (const auto& t : polarizability_terms(species, level, omega, options)) {
    alpha.scalar += t.scalar;
    alpha.tensor += t.tensor;
  }
  return alpha;
}

double scalar_shift(const Polarizability& alpha, const LaserField& field) {
  return -0.25 * field.field_amplitude_squared() * alpha.scalar * units::polarizability_au / units::planck;
}

}  // namespace ionmcmr
