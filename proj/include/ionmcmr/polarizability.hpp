#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ionmcmr/atomic_data.hpp"

namespace ionmcmr {

/// Dynamic polarizability of one level, in atomic units.
struct Polarizability {
  std::string level;
  double omega = 0.0;  // laser angular frequency, rad/s
  double scalar = 0.0;
  double tensor = 0.0;
};

struct PolarizabilityOptions {
  /// Evaluation closer than this (in Hz) to any contributing line is rejected.
  double resonance_guard_hz = 10e9;
};

/// Contribution of a single line to the scalar and tensor sums.
struct LineTerm {
  const TransitionLine* line = nullptr;
  double scalar = 0.0;
  double tensor = 0.0;
};

/// Per-line terms for every line touching `level`. Each term is weighted by
/// 2J'+1 of the partner level and carries a minus sign when the partner lies
/// below `level`. Throws NumericalError near a resonance.
std::vector<LineTerm> polarizability_terms(const Species& species, std::string_view level, double omega,
                                           const PolarizabilityOptions& options = {});

Polarizability dynamic_polarizability(const Species& species, std::string_view level, double omega,
                                      const PolarizabilityOptions& options = {});

/// m-independent light shift -(1/4) E^2 alpha_scalar / h, in Hz.
double scalar_shift(const Polarizability& alpha, const LaserField& field);

}  // namespace ionmcmr
