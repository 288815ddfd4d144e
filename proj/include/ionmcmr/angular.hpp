#pragma once

// Angular-momentum algebra: Wigner 3j/6j symbols, spherical components of
// polarization vectors and spin matrices.
//
// Phase conventions (used everywhere in the library):
//   * Condon-Shortley phases for J+/J- and Clebsch-Gordan coefficients.
//   * Spherical unit vectors e_{+1} = -(x + i y)/sqrt(2), e_0 = z,
//     e_{-1} = (x - i y)/sqrt(2); the spherical components of a vector are
//     A_q = e_q . A (no conjugation), so that A = sum_q (-1)^q A_{-q} e_q.
//   * The rank-2 component of a pair (a, b) is the symmetric coupling
//     T_q = sum_{q1 q2} <1 q1 1 q2 | 2 q> a_{q1} b_{q2}.
//   * Spin matrices use the basis |j, m> ordered by ascending m.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <compare>
#include <concepts>
#include <cstdlib>
#include <string>
#include <string_view>

namespace ionmcmr {

/// A non-negative or signed multiple of 1/2, stored as its double.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;
  constexpr explicit HalfInteger(int whole) : twice_(2 * whole) {}

  static constexpr HalfInteger from_twice(int twice) {
    HalfInteger h;
    h.twice_ = twice;
    return h;
  }

  /// Accepts "3/2", "-1/2", "2", "0".
  static HalfInteger parse(std::string_view text);

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integral() const { return twice_ % 2 == 0; }
  /// Number of projections 2j+1 (only meaningful for j >= 0).
  constexpr int multiplicity() const { return twice_ + 1; }

  std::string str() const;

  constexpr HalfInteger operator-() const { return from_twice(-twice_); }
  friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) { return from_twice(a.twice_ + b.twice_); }
  friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) { return from_twice(a.twice_ - b.twice_); }
  friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;

 private:
  int twice_ = 0;
};

namespace literals {
/// 3_half == HalfInteger 3/2.
constexpr HalfInteger operator""_half(unsigned long long twice) {
  return HalfInteger::from_twice(static_cast<int>(twice));
}
}  // namespace literals

namespace detail {

template <std::floating_point Real>
Real factorial(int n) {
  static const auto table = [] {
    std::array<Real, 171> t{};
    t[0] = Real(1);
    for (int i = 1; i < 171; ++i) t[i] = t[i - 1] * Real(i);
    return t;
  }();
  return table.at(static_cast<std::size_t>(n));
}

// Triangle coefficient Delta(a b c) on doubled arguments; zero when the triad is invalid.
template <std::floating_point Real>
Real triangle_coefficient(int ta, int tb, int tc) {
  if ((ta + tb + tc) % 2 != 0) return Real(0);
  if (tc < std::abs(ta - tb) || tc > ta + tb) return Real(0);
  return factorial<Real>((ta + tb - tc) / 2) / factorial<Real>((ta + tb + tc) / 2 + 1) *
         factorial<Real>((ta - tb + tc) / 2) * factorial<Real>((-ta + tb + tc) / 2);
}

constexpr int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace detail

/// True when (j1, j2, j3) can couple: triangle rule and integral sum.
constexpr bool triangle(HalfInteger j1, HalfInteger j2, HalfInteger j3) {
  const int a = j1.twice(), b = j2.twice(), c = j3.twice();
  if (a < 0 || b < 0 || c < 0) return false;
  if ((a + b + c) % 2 != 0) return false;
  return c >= (a > b ? a - b : b - a) && c <= a + b;
}

/// Wigner 3j symbol via the Racah sum. Returns exactly 0 whenever a
/// selection rule fails.
template <std::floating_point Real = double>
Real wigner3j(HalfInteger j1, HalfInteger j2, HalfInteger j3, HalfInteger m1, HalfInteger m2, HalfInteger m3) {
  const int tj1 = j1.twice(), tj2 = j2.twice(), tj3 = j3.twice();
  const int tm1 = m1.twice(), tm2 = m2.twice(), tm3 = m3.twice();
  if (tm1 + tm2 + tm3 != 0) return Real(0);
  if (!triangle(j1, j2, j3)) return Real(0);
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) return Real(0);
  if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0) return Real(0);

  using detail::factorial;
  // Integer arguments of the factorials in the summand, all halved.
  const int a1 = (tj3 - tj2 + tm1) / 2;
  const int a2 = (tj3 - tj1 - tm2) / 2;
  const int b1 = (tj1 + tj2 - tj3) / 2;
  const int b2 = (tj1 - tm1) / 2;
  const int b3 = (tj2 + tm2) / 2;
  const int kmin = std::max({0, -a1, -a2});
  const int kmax = std::min({b1, b2, b3});

  Real sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    const Real den = factorial<Real>(k) * factorial<Real>(a1 + k) * factorial<Real>(a2 + k) *
                     factorial<Real>(b1 - k) * factorial<Real>(b2 - k) * factorial<Real>(b3 - k);
    sum += Real(detail::parity_sign(k)) / den;
  }
  const Real norm = detail::triangle_coefficient<Real>(tj1, tj2, tj3) *
                    factorial<Real>((tj1 + tm1) / 2) * factorial<Real>((tj1 - tm1) / 2) *
                    factorial<Real>((tj2 + tm2) / 2) * factorial<Real>((tj2 - tm2) / 2) *
                    factorial<Real>((tj3 + tm3) / 2) * factorial<Real>((tj3 - tm3) / 2);
  const int phase = detail::parity_sign((tj1 - tj2 - tm3) / 2);
  return Real(phase) * std::sqrt(norm) * sum;
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6} via the Racah sum; 0 if any triad fails.
template <std::floating_point Real = double>
Real wigner6j(HalfInteger j1, HalfInteger j2, HalfInteger j3, HalfInteger j4, HalfInteger j5, HalfInteger j6) {
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) || !triangle(j4, j5, j3)) {
    return Real(0);
  }
  using detail::factorial;
  const int t1 = j1.twice(), t2 = j2.twice(), t3 = j3.twice();
  const int t4 = j4.twice(), t5 = j5.twice(), t6 = j6.twice();
  const int alpha[4] = {(t1 + t2 + t3) / 2, (t1 + t5 + t6) / 2, (t4 + t2 + t6) / 2, (t4 + t5 + t3) / 2};
  const int beta[3] = {(t1 + t2 + t4 + t5) / 2, (t2 + t3 + t5 + t6) / 2, (t3 + t1 + t6 + t4) / 2};
  const int tmin = *std::max_element(alpha, alpha + 4);
  const int tmax = *std::min_element(beta, beta + 3);

  Real sum = 0;
  for (int t = tmin; t <= tmax; ++t) {
    Real den = 1;
    for (int a : alpha) den *= factorial<Real>(t - a);
    for (int b : beta) den *= factorial<Real>(b - t);
    sum += Real(detail::parity_sign(t)) * factorial<Real>(t + 1) / den;
  }
  const Real norm = detail::triangle_coefficient<Real>(t1, t2, t3) * detail::triangle_coefficient<Real>(t1, t5, t6) *
                    detail::triangle_coefficient<Real>(t4, t2, t6) * detail::triangle_coefficient<Real>(t4, t5, t3);
  return std::sqrt(norm) * sum;
}

/// <j1 m1 j2 m2 | J M>.
template <std::floating_point Real = double>
Real clebsch_gordan(HalfInteger j1, HalfInteger m1, HalfInteger j2, HalfInteger m2, HalfInteger J, HalfInteger M) {
  const int phase = detail::parity_sign((j1.twice() - j2.twice() + M.twice()) / 2);
  return Real(phase) * std::sqrt(Real(J.twice() + 1)) * wigner3j<Real>(j1, j2, J, m1, m2, -M);
}

/// Geometric part of <J_u m_u | T^k_q | J_l m_l> by the Wigner-Eckart theorem:
/// (-1)^(J_u - m_u) (J_u k J_l; -m_u q m_l).
template <std::floating_point Real = double>
Real wigner_eckart_factor(HalfInteger ju, HalfInteger mu, int rank, int q, HalfInteger jl, HalfInteger ml) {
  const Real w = wigner3j<Real>(ju, HalfInteger(rank), jl, -mu, HalfInteger(q), ml);
  if (w == Real(0)) return w;
  return Real(detail::parity_sign((ju.twice() - mu.twice()) / 2)) * w;
}

/// Laser geometry: polarization (possibly complex), wavevector direction and
/// quantization axis. All three are unit vectors.
struct PolarizationGeometry {
  Eigen::Vector3cd epsilon{1.0, 0.0, 0.0};
  Eigen::Vector3d eta{0.0, 1.0, 0.0};
  Eigen::Vector3d b_axis{0.0, 0.0, 1.0};

  /// Throws NumericalError when any vector is not normalized to 1e-9.
  void validate() const;
  /// |epsilon . eta| below tolerance (transverse light).
  bool is_transverse(double tol = 1e-9) const;
};

/// Spherical components {A_-1, A_0, A_+1} of a vector expressed in the frame
/// whose z axis is `axis`.
std::array<std::complex<double>, 3> spherical_components(const Eigen::Vector3cd& v, const Eigen::Vector3d& axis);

/// c_k^(q) epsilon_k: spherical component q of the polarization, |q| <= 1.
std::complex<double> tensor_rank1(int q, const PolarizationGeometry& geom);

/// c_kl^(q) epsilon_k eta_l: rank-2 spherical component of the symmetric
/// coupling of polarization and wavevector, |q| <= 2.
std::complex<double> tensor_rank2(int q, const PolarizationGeometry& geom);

template <typename Scalar = double>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Spin matrices for angular momentum j in the ascending-m basis.
template <typename Scalar = double>
struct SpinOperators {
  ComplexMatrix<Scalar> jz, jplus, jminus, jx, jy;
};

template <typename Scalar = double>
SpinOperators<Scalar> spin_operators(HalfInteger j) {
  using C = std::complex<Scalar>;
  const int n = j.multiplicity();
  SpinOperators<Scalar> ops;
  ops.jz = ComplexMatrix<Scalar>::Zero(n, n);
  ops.jplus = ComplexMatrix<Scalar>::Zero(n, n);
  const Scalar jj = Scalar(j.value());
  for (int i = 0; i < n; ++i) {
    const Scalar m = Scalar(-j.value() + i);
    ops.jz(i, i) = C(m);
    if (i + 1 < n) ops.jplus(i + 1, i) = C(std::sqrt(jj * (jj + 1) - m * (m + 1)));
  }
  ops.jminus = ops.jplus.adjoint();
  ops.jx = (ops.jplus + ops.jminus) * C(0.5);
  ops.jy = (ops.jplus - ops.jminus) * C(0, -0.5);
  return ops;
}

/// Projection m of the ascending-m basis index.
constexpr HalfInteger projection_at(HalfInteger j, int index) { return HalfInteger::from_twice(-j.twice() + 2 * index); }

}  // namespace ionmcmr
