#pragma once

// Laser couplings and spontaneous-emission operators between dressed manifolds.
//
// Coupling convention: for a rank-k transition the bare matrix element is
//   M(u, l) = sum_q (-1)^(J_u - m_u) (J_u k J_l; -m_u q m_l) (-1)^q T_{-q} delta(m_I)
// with T the rank-k geometry tensor, and the dressed element is U_u^dagger M U_l.
// Rabi frequencies are Omega0 * M, entering H as (Omega / 2) |u><l| + h.c.

#include <string>
#include <vector>

#include "ionmcmr/level_structure.hpp"
#include "ionmcmr/lindblad.hpp"

namespace ionmcmr {

/// A diagonalized manifold plus the frame groups of its dressed states.
struct DressedManifold {
  std::string name;
  EigenLevels<double> levels;
  std::vector<int> groups;          // one entry per dressed state
  std::vector<std::string> labels;  // one entry per dressed state
};

/// Geometric coupling matrix (Omega0 = 1), rows: upper dressed states, cols: lower.
ComplexMatrix<double> coupling_matrix(const DressedManifold& upper, const DressedManifold& lower, int rank,
                                      const PolarizationGeometry& geom);

/// S -> D~ quadrupole Rabi matrix (rows: D~, cols: S).
ComplexMatrix<double> rabi_2052(const DressedManifold& d, const DressedManifold& s, double omega0,
                                const PolarizationGeometry& geom);

/// D~ -> P dipole Rabi matrix (rows: P, cols: D~).
ComplexMatrix<double> rabi_650(const DressedManifold& p, const DressedManifold& d, double omega0,
                               const PolarizationGeometry& geom);

/// Dipole decay of `upper` into `lower` at total rate `rate`. One operator per
/// polarization q and per (lower group, upper group) pair; photons of the same
/// polarization within a group pair add coherently.
std::vector<BlockOperator> decay_operators(const DressedManifold& upper, const DressedManifold& lower, double rate,
                                           int upper_offset, int lower_offset);

/// P -> S at beta Gamma and P -> D~ at (1 - beta) Gamma for the basis order S, D~, P.
/// Throws NumericalError when sum L^dagger L on P deviates from Gamma by more than 1e-6.
std::vector<BlockOperator> collapse_operators(const DressedManifold& s, const DressedManifold& d,
                                              const DressedManifold& p, double gamma, double beta);

/// Largest |entry|; used to normalize Omega0 to a target maximal Rabi frequency.
double max_abs(const ComplexMatrix<double>& m);

}  // namespace ionmcmr
