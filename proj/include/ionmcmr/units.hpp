#pragma once

#include <numbers>
#include <string_view>

namespace ionmcmr::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018
inline constexpr double speed_of_light = 299792458.0;           // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double planck = 6.62607015e-34;                 // J s
inline constexpr double hbar = planck / two_pi;
inline constexpr double bohr_magneton_hz_per_tesla = 1.39962449361e10;  // mu_B / h

/// One atomic unit of polarizability, 4 pi eps0 a0^3, in C^2 m^2 / J.
inline constexpr double polarizability_au = 1.64877727436e-41;

inline constexpr double gauss = 1e-4;  // tesla
inline constexpr double mw_per_cm2 = 1e10;  // W/m^2

/// Squared peak field amplitude of a travelling wave of the given intensity.
constexpr double field_amplitude_squared(double intensity_w_m2) {
  return 2.0 * intensity_w_m2 / (speed_of_light * vacuum_permittivity);
}

constexpr double angular_from_wavelength(double wavelength_m) {
  return two_pi * speed_of_light / wavelength_m;
}

/// Physical dimension of a configuration quantity.
enum class Dimension { Frequency, MagneticField, Intensity, Time, Length, Dimensionless };

/// Parses "<number><unit>" (e.g. "4.1G", "6.1MW/cm2", "2MHz", "36us") into SI.
/// Frequencies are returned in Hz (cyclic), magnetic fields in tesla.
/// Throws ConfigError for a missing or unsupported unit.
double parse_quantity(std::string_view text, Dimension dim);

const char* dimension_name(Dimension dim);

}  // namespace ionmcmr::units
