#pragma once

// Per-manifold Hamiltonians (Stark + hyperfine + Zeeman) in the product basis
// |m_I, m_J>, index = i_I * (2J+1) + i_J with both projections ascending.
// All operators are in Hz (cyclic frequency).

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ionmcmr/angular.hpp"
#include "ionmcmr/atomic_data.hpp"
#include "ionmcmr/error.hpp"
#include "ionmcmr/polarizability.hpp"

namespace ionmcmr {

struct ManifoldBasis {
  HalfInteger j;
  HalfInteger i;  // nuclear spin

  int dim() const { return j.multiplicity() * i.multiplicity(); }
  int index(int i_index, int j_index) const { return i_index * j.multiplicity() + j_index; }
  HalfInteger mj(int idx) const { return projection_at(j, idx % j.multiplicity()); }
  HalfInteger mi(int idx) const { return projection_at(i, idx / j.multiplicity()); }
  HalfInteger mf(int idx) const { return mj(idx) + mi(idx); }
};

template <typename Scalar = double>
struct ManifoldHamiltonian {
  std::string level;
  ManifoldBasis basis;
  ComplexMatrix<Scalar> matrix;
};

/// Dressed states of a manifold: ascending energies and unitary mixing whose
/// columns are the eigenvectors over the bare basis.
template <typename Scalar = double>
struct EigenLevels {
  ManifoldBasis basis;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> energies;
  ComplexMatrix<Scalar> mixing;

  int size() const { return static_cast<int>(energies.size()); }
};

namespace detail {

/// Embeds an operator on the electronic (J) factor into the product space.
template <typename Scalar>
ComplexMatrix<Scalar> on_electron(const ComplexMatrix<Scalar>& op, const ManifoldBasis& b) {
  const int nj = b.j.multiplicity(), ni = b.i.multiplicity();
  ComplexMatrix<Scalar> out = ComplexMatrix<Scalar>::Zero(b.dim(), b.dim());
  for (int k = 0; k < ni; ++k) out.block(k * nj, k * nj, nj, nj) = op;
  return out;
}

/// Embeds an operator on the nuclear (I) factor into the product space.
template <typename Scalar>
ComplexMatrix<Scalar> on_nucleus(const ComplexMatrix<Scalar>& op, const ManifoldBasis& b) {
  const int nj = b.j.multiplicity(), ni = b.i.multiplicity();
  ComplexMatrix<Scalar> out = ComplexMatrix<Scalar>::Zero(b.dim(), b.dim());
  for (int r = 0; r < ni; ++r)
    for (int c = 0; c < ni; ++c)
      for (int k = 0; k < nj; ++k) out(r * nj + k, c * nj + k) = op(r, c);
  return out;
}

template <typename Scalar>
ComplexMatrix<Scalar> i_dot_j(const ManifoldBasis& b) {
  const auto sj = spin_operators<Scalar>(b.j);
  const auto si = spin_operators<Scalar>(b.i);
  return on_nucleus<Scalar>(si.jz, b) * on_electron<Scalar>(sj.jz, b) +
         (on_nucleus<Scalar>(si.jplus, b) * on_electron<Scalar>(sj.jminus, b) +
          on_nucleus<Scalar>(si.jminus, b) * on_electron<Scalar>(sj.jplus, b)) *
             std::complex<Scalar>(0.5);
}

}  // namespace detail

/// -(1/4) E^2 [alpha_s + alpha_t (6 (eps.J)^2 - 2 J^2) / (2J(2J-1))] / h with eps
/// the (real) polarization of `field` expressed in its quantization frame.
template <typename Scalar = double>
ComplexMatrix<Scalar> stark_operator(const Polarizability& alpha, const LaserField& field, const ManifoldBasis& b) {
  using C = std::complex<Scalar>;
  const double prefactor = -0.25 * field.field_amplitude_squared() * units::polarizability_au / units::planck;
  const int nj = b.j.multiplicity();
  ComplexMatrix<Scalar> hj = ComplexMatrix<Scalar>::Identity(nj, nj) * C(Scalar(prefactor * alpha.scalar));
  if (b.j.twice() < 2) {
    if (alpha.tensor != 0.0) throw NumericalError("tensor polarizability given for a J = 1/2 level");
    return detail::on_electron<Scalar>(hj, b);
  }
  if (field.geometry.epsilon.imag().norm() > 1e-12) {
    throw NumericalError("the Stark operator assumes linear (real) polarization");
  }
  const auto e = spherical_components(field.geometry.epsilon, field.geometry.b_axis);
  const auto s = spin_operators<Scalar>(b.j);
  const double r = 1.0 / std::sqrt(2.0);
  // eps . J = -eps_{+1} J_{-1} + eps_0 J_0 - eps_{-1} J_{+1}, with J_{+1} = -J+/sqrt2, J_{-1} = J-/sqrt2.
  const ComplexMatrix<Scalar> eps_dot_j = s.jminus * C(-e[2] * r) + s.jz * C(e[1]) + s.jplus * C(e[0] * r);
  const double jv = b.j.value();
  const ComplexMatrix<Scalar> shape =
      (Scalar(6) * eps_dot_j * eps_dot_j -
       ComplexMatrix<Scalar>::Identity(nj, nj) * C(Scalar(2 * jv * (jv + 1)))) /
      C(Scalar(2 * jv * (2 * jv - 1)));
  hj += shape * C(Scalar(prefactor * alpha.tensor));
  return detail::on_electron<Scalar>(hj, b);
}

/// g_J mu_B B m_J / h, diagonal; B is the field magnitude along the quantization axis.
template <typename Scalar = double>
ComplexMatrix<Scalar> zeeman_operator(double g_j, double b_tesla, const ManifoldBasis& b) {
  const auto s = spin_operators<Scalar>(b.j);
  return detail::on_electron<Scalar>(s.jz, b) * std::complex<Scalar>(Scalar(g_j * units::bohr_magneton_hz_per_tesla * b_tesla));
}

/// A I.J + B [6 (I.J)^2 + 3 I.J - 2 I^2 J^2] / [2I(2I-1) 2J(2J-1)].
template <typename Scalar = double>
ComplexMatrix<Scalar> hyperfine_operator(const HyperfineConstants& k, const ManifoldBasis& b) {
  using C = std::complex<Scalar>;
  const int n = b.dim();
  if (b.i.twice() == 0) {
    if (k.a_hz != 0.0 || k.b_hz != 0.0) throw NumericalError("hyperfine constants given for I = 0");
    return ComplexMatrix<Scalar>::Zero(n, n);
  }
  const ComplexMatrix<Scalar> ij = detail::i_dot_j<Scalar>(b);
  ComplexMatrix<Scalar> h = ij * C(Scalar(k.a_hz));
  if (k.b_hz != 0.0) {
    if (b.i.twice() < 2 || b.j.twice() < 2) throw NumericalError("quadrupole term requires I >= 1 and J >= 1");
    const double iv = b.i.value(), jv = b.j.value();
    const ComplexMatrix<Scalar> id = ComplexMatrix<Scalar>::Identity(n, n);
    const ComplexMatrix<Scalar> quad =
        (Scalar(6) * ij * ij + Scalar(3) * ij - id * C(Scalar(2 * iv * (iv + 1) * jv * (jv + 1)))) /
        C(Scalar(2 * iv * (2 * iv - 1) * 2 * jv * (2 * jv - 1)));
    h += quad * C(Scalar(k.b_hz));
  }
  return h;
}

/// Hermitian eigendecomposition with deterministic phases: the largest
/// component of each eigenvector is made real and positive.
template <typename Scalar = double>
EigenLevels<Scalar> diagonalize(const ComplexMatrix<Scalar>& h, const ManifoldBasis& basis) {
  const Scalar scale = std::max(h.cwiseAbs().maxCoeff(), Scalar(1));
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
    throw NumericalError("manifold Hamiltonian is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  EigenLevels<Scalar> out;
  out.basis = basis;
  out.energies = solver.eigenvalues();
  out.mixing = solver.eigenvectors();
  for (int c = 0; c < out.mixing.cols(); ++c) {
    Eigen::Index pivot = 0;
    const Scalar top = out.mixing.col(c).cwiseAbs().maxCoeff();
    while (std::abs(out.mixing(pivot, c)) < top - Scalar(1e-9)) ++pivot;
    const auto z = out.mixing(pivot, c);
    out.mixing.col(c) *= std::conj(z) / std::abs(z);
  }
  return out;
}

/// Full Hamiltonian of one level: Stark (at the field's frequency) + hyperfine + Zeeman.
ManifoldHamiltonian<double> manifold_hamiltonian(const Species& species, std::string_view level, double b_tesla,
                                                 const LaserField& stark_field);

/// Nearest allowed F for dressed state `k`, from <F^2>.
HalfInteger dominant_f(const EigenLevels<double>& levels, int k);
/// <m_F> of dressed state `k`.
double mean_mf(const EigenLevels<double>& levels, int k);

struct ShiftCurves {
  std::string level;
  std::vector<double> intensities;            // W/m^2
  std::vector<std::vector<double>> energies;  // [row][state], Hz, adiabatically tracked
};

/// Dressed energies over a monotone intensity grid, relative to the zero-field
/// barycenter. States are followed by maximal eigenvector overlap; an overlap
/// below 0.5 throws ConvergenceError naming the grid point.
ShiftCurves shift_curves(const Species& species, std::string_view level, double b_tesla,
                         const std::vector<double>& intensity_grid, const LaserField& stark_field);

}  // namespace ionmcmr
