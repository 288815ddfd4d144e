#include <doctest.h>

#include <complex>
#include <random>

#include "ionmcmr/angular.hpp"
#include "ionmcmr/error.hpp"
#include "oracles/racah_rational.hpp"

using namespace ionmcmr;
using namespace ionmcmr::literals;

namespace {

HalfInteger h(int twice) { return HalfInteger::from_twice(twice); }

void check_against_oracle(double value, const oracle::ExactValue& exact) {
  const double ref = exact.to_double();
  if (exact.sign == 0) {
    // Accidental zeros of the Racah sum cancel only to rounding.
    CHECK(std::abs(value) < 1e-15);
  } else {
    CHECK(std::abs(value - ref) <= 1e-12 * std::abs(ref));
  }
}

}  // namespace

TEST_CASE("HalfInteger parsing and printing") {
  CHECK(HalfInteger::parse("3/2") == 3_half);
  CHECK(HalfInteger::parse("-1/2") == -(1_half));
  CHECK(HalfInteger::parse("2") == HalfInteger(2));
  CHECK(HalfInteger::parse("0").twice() == 0);
  CHECK((5_half).str() == "5/2");
  CHECK(HalfInteger(2).str() == "2");
  CHECK_THROWS_AS(HalfInteger::parse("3/4"), ConfigError);
  CHECK_THROWS_AS(HalfInteger::parse("x"), ConfigError);
}

TEST_CASE("3j frozen values") {
  // Reference values evaluated symbolically.
  CHECK(wigner3j(HalfInteger(1), HalfInteger(1), HalfInteger(0), HalfInteger(0), HalfInteger(0), HalfInteger(0)) ==
        doctest::Approx(-0.57735026918962576).epsilon(1e-14));
  CHECK(wigner3j(1_half, HalfInteger(2), 3_half, -(1_half), HalfInteger(0), 1_half) ==
        doctest::Approx(-0.31622776601683793).epsilon(1e-14));
  CHECK(wigner3j(3_half, HalfInteger(2), 3_half, -(3_half), HalfInteger(2), -(1_half)) ==
        doctest::Approx(0.31622776601683793).epsilon(1e-14));
  CHECK(wigner3j(HalfInteger(2), HalfInteger(2), HalfInteger(2), HalfInteger(1), HalfInteger(-1), HalfInteger(0)) ==
        doctest::Approx(0.11952286093343936).epsilon(1e-14));
}

TEST_CASE("3j selection rules give exact zero") {
  CHECK(wigner3j(HalfInteger(1), HalfInteger(1), HalfInteger(1), HalfInteger(1), HalfInteger(0), HalfInteger(0)) == 0.0);
  CHECK(wigner3j(HalfInteger(1), HalfInteger(1), HalfInteger(3), HalfInteger(0), HalfInteger(0), HalfInteger(0)) == 0.0);
  CHECK(wigner3j(1_half, 1_half, HalfInteger(2), 1_half, -(1_half), HalfInteger(0)) == 0.0);
  CHECK(wigner3j(HalfInteger(1), HalfInteger(1), HalfInteger(1), HalfInteger(0), HalfInteger(0), HalfInteger(0)) == 0.0);
}

TEST_CASE("6j frozen values") {
  CHECK(wigner6j(HalfInteger(1), HalfInteger(0), HalfInteger(1), 1_half, 1_half, 1_half) ==
        doctest::Approx(0.40824829046386302).epsilon(1e-14));
  CHECK(wigner6j(HalfInteger(1), HalfInteger(2), HalfInteger(1), 3_half, 3_half, 3_half) ==
        doctest::Approx(-0.16329931618554521).epsilon(1e-14));
  CHECK(wigner6j(HalfInteger(1), HalfInteger(2), HalfInteger(1), 5_half, 5_half, 5_half) ==
        doctest::Approx(-0.14253932901995967).epsilon(1e-14));
  CHECK(wigner6j(HalfInteger(1), HalfInteger(1), HalfInteger(1), 1_half, 1_half, 1_half) ==
        doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(wigner6j(HalfInteger(1), HalfInteger(1), HalfInteger(3), 1_half, 1_half, 1_half) == 0.0);
  CHECK(wigner6j(HalfInteger(1), 1_half, HalfInteger(1), 1_half, HalfInteger(1), 1_half) == 0.0);
}

TEST_CASE("3j matches exact Racah oracle for j <= 4") {
  int compared = 0;
  for (int j1 = 0; j1 <= 8; ++j1)
    for (int j2 = 0; j2 <= 8; ++j2)
      for (int j3 = std::abs(j1 - j2); j3 <= std::min(8, j1 + j2); j3 += 2)
        for (int m1 = -j1; m1 <= j1; m1 += 2)
          for (int m2 = -j2; m2 <= j2; m2 += 2) {
            const int m3 = -m1 - m2;
            if (std::abs(m3) > j3) continue;
            check_against_oracle(wigner3j(h(j1), h(j2), h(j3), h(m1), h(m2), h(m3)),
                                 oracle::three_j(j1, j2, j3, m1, m2, m3));
            ++compared;
          }
  CHECK(compared > 4000);
}

TEST_CASE("6j matches exact Racah oracle for j <= 4") {
  int compared = 0;
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; b <= 8; ++b)
      for (int c = std::abs(a - b); c <= std::min(8, a + b); c += 2)
        for (int d = 0; d <= 8; ++d)
          for (int e = 0; e <= 8; ++e) {
            if (!oracle::valid_triad(d, e, c)) continue;
            for (int f = 0; f <= 8; ++f) {
              if (!oracle::valid_triad(a, e, f) || !oracle::valid_triad(d, b, f)) continue;
              check_against_oracle(wigner6j(h(a), h(b), h(c), h(d), h(e), h(f)), oracle::six_j(a, b, c, d, e, f));
              ++compared;
            }
          }
  CHECK(compared > 1000);
}

TEST_CASE("3j orthogonality for j <= 4") {
  double worst = 0.0;
  for (int j1 = 0; j1 <= 8; ++j1)
    for (int j2 = 0; j2 <= 8; ++j2)
      for (int j3 = std::abs(j1 - j2); j3 <= j1 + j2; j3 += 2)
        for (int j3p = std::abs(j1 - j2); j3p <= j1 + j2; j3p += 2)
          for (int m3 = -j3; m3 <= j3; m3 += 2)
            for (int m3p = -j3p; m3p <= j3p; m3p += 2) {
              double sum = 0.0;
              for (int m1 = -j1; m1 <= j1; m1 += 2)
                for (int m2 = -j2; m2 <= j2; m2 += 2) {
                  sum += wigner3j(h(j1), h(j2), h(j3), h(m1), h(m2), h(m3)) *
                         wigner3j(h(j1), h(j2), h(j3p), h(m1), h(m2), h(m3p));
                }
              sum *= (j3 + 1);
              const double expected = (j3 == j3p && m3 == m3p) ? 1.0 : 0.0;
              worst = std::max(worst, std::abs(sum - expected));
            }
  CHECK(worst < 1e-12);
}

TEST_CASE("6j Biedenharn-Elliott identity for arguments <= 5/2") {
  // sum_x (-1)^(S+x) (2x+1) {a b x; c d p}{c d x; e f q}{e f x; b a r}
  //   = {p q r; e a d}{p q r; f b c}
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> pick(0, 5);
  int checked = 0;
  for (int trial = 0; trial < 200000 && checked < 400; ++trial) {
    const int a = pick(rng), b = pick(rng), c = pick(rng), d = pick(rng), e = pick(rng), f = pick(rng);
    const int p = pick(rng), q = pick(rng), r = pick(rng);
    const double rhs = wigner6j(h(p), h(q), h(r), h(e), h(a), h(d)) * wigner6j(h(p), h(q), h(r), h(f), h(b), h(c));
    if (rhs == 0.0) continue;
    const int s = a + b + c + d + e + f + p + q + r;
    double lhs = 0.0;
    for (int x = 0; x <= 20; ++x) {
      if ((s + x) % 2 != 0) continue;
      const double term = wigner6j(h(a), h(b), h(x), h(c), h(d), h(p)) *
                          wigner6j(h(c), h(d), h(x), h(e), h(f), h(q)) *
                          wigner6j(h(e), h(f), h(x), h(b), h(a), h(r));
      lhs += detail::parity_sign((s + x) / 2) * (x + 1) * term;
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("Clebsch-Gordan coupling of two spin-1/2") {
  CHECK(clebsch_gordan(1_half, 1_half, 1_half, -(1_half), HalfInteger(0), HalfInteger(0)) ==
        doctest::Approx(std::sqrt(0.5)));
  CHECK(clebsch_gordan(1_half, -(1_half), 1_half, 1_half, HalfInteger(0), HalfInteger(0)) ==
        doctest::Approx(-std::sqrt(0.5)));
  CHECK(clebsch_gordan(1_half, 1_half, 1_half, 1_half, HalfInteger(1), HalfInteger(1)) == doctest::Approx(1.0));
}

TEST_CASE("rank-1 geometry") {
  PolarizationGeometry g;
  g.epsilon = Eigen::Vector3cd(0, 0, 1);
  g.eta = Eigen::Vector3d(1, 0, 0);
  CHECK(std::abs(tensor_rank1(0, g)) == doctest::Approx(1.0));
  CHECK(std::abs(tensor_rank1(1, g)) == doctest::Approx(0.0));

  g.epsilon = Eigen::Vector3cd(1, 0, 0);
  g.eta = Eigen::Vector3d(0, 1, 0);
  CHECK(std::abs(tensor_rank1(1, g)) == doctest::Approx(std::sqrt(0.5)));
  CHECK(std::abs(tensor_rank1(-1, g)) == doctest::Approx(std::sqrt(0.5)));
  CHECK(std::abs(tensor_rank1(0, g)) == doctest::Approx(0.0));

  std::mt19937 rng(7);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    Eigen::Vector3cd eps;
    for (int k = 0; k < 3; ++k) eps[k] = {n(rng), n(rng)};
    g.epsilon = eps.normalized();
    g.b_axis = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
    double total = 0.0;
    for (int q = -1; q <= 1; ++q) total += std::norm(tensor_rank1(q, g));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(tensor_rank1(2, g), NumericalError);
}

TEST_CASE("rank-2 geometry") {
  PolarizationGeometry g;  // epsilon = x, eta = y, B = z
  CHECK(std::abs(tensor_rank2(0, g)) < 1e-15);
  CHECK(std::abs(tensor_rank2(1, g)) < 1e-15);
  CHECK(std::abs(tensor_rank2(-1, g)) < 1e-15);
  CHECK(tensor_rank2(2, g).imag() == doctest::Approx(0.5));
  CHECK(tensor_rank2(-2, g).imag() == doctest::Approx(-0.5));

  // Parallel vectors along the axis: only the q = 0 component, CG <1 0 1 0|2 0>.
  PolarizationGeometry par;
  par.epsilon = Eigen::Vector3cd(0, 0, 1);
  par.eta = Eigen::Vector3d(0, 0, 1);
  CHECK(tensor_rank2(0, par).real() == doctest::Approx(std::sqrt(2.0 / 3.0)));
  for (int q : {-2, -1, 1, 2}) CHECK(std::abs(tensor_rank2(q, par)) < 1e-15);

  std::mt19937 rng(11);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d a = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
    const Eigen::Vector3d b = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
    PolarizationGeometry g1, g2;
    g1.epsilon = a.cast<std::complex<double>>();
    g1.eta = b;
    g2.epsilon = b.cast<std::complex<double>>();
    g2.eta = a;
    g1.b_axis = g2.b_axis = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
    for (int q = -2; q <= 2; ++q) CHECK(std::abs(tensor_rank2(q, g1) - tensor_rank2(q, g2)) < 1e-14);
  }
  CHECK_THROWS_AS(tensor_rank2(3, g), NumericalError);
}

TEST_CASE("geometry validation") {
  PolarizationGeometry g;
  CHECK_NOTHROW(g.validate());
  CHECK(g.is_transverse());
  g.eta = Eigen::Vector3d(0, 2, 0);
  CHECK_THROWS_AS(g.validate(), NumericalError);
}

TEST_CASE("spin operators obey the angular momentum algebra") {
  for (int twice = 0; twice <= 7; ++twice) {
    const auto ops = spin_operators(h(twice));
    const ComplexMatrix<> comm = ops.jx * ops.jy - ops.jy * ops.jx;
    CHECK((comm - std::complex<double>(0, 1) * ops.jz).norm() < 1e-12);
    const double j = 0.5 * twice;
    const ComplexMatrix<> casimir = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
    const auto n = casimir.rows();
    CHECK((casimir - ComplexMatrix<>::Identity(n, n) * (j * (j + 1))).norm() < 1e-12);
  }
  CHECK(projection_at(3_half, 0) == -(3_half));
  CHECK(projection_at(3_half, 3) == 3_half);
}
