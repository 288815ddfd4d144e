#include "ionmcmr/angular.hpp"

#include <charconv>

#include "ionmcmr/error.hpp"

namespace ionmcmr {

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("not a half-integer: '" + std::string(whole) + "'");
  }
  return v;
}

Eigen::Matrix3d frame_for_axis(const Eigen::Vector3d& axis) {
  const Eigen::Vector3d z = axis.normalized();
  Eigen::Vector3d seed = Eigen::Vector3d::UnitX();
  if (std::abs(seed.dot(z)) > 0.9) seed = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d x = (seed - seed.dot(z) * z).normalized();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d rows;
  rows.row(0) = x.transpose();
  rows.row(1) = y.transpose();
  rows.row(2) = z.transpose();
  return rows;
}

}  // namespace

HalfInteger HalfInteger::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return HalfInteger(parse_int(text, text));
  if (text.substr(slash + 1) != "2") throw ConfigError("not a half-integer: '" + std::string(text) + "'");
  return from_twice(parse_int(text.substr(0, slash), text));
}

std::string HalfInteger::str() const {
  if (is_integral()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

void PolarizationGeometry::validate() const {
  constexpr double tol = 1e-9;
  if (std::abs(epsilon.norm() - 1.0) > tol) throw NumericalError("polarization vector is not unit-norm");
  if (std::abs(eta.norm() - 1.0) > tol) throw NumericalError("wavevector direction is not unit-norm");
  if (std::abs(b_axis.norm() - 1.0) > tol) throw NumericalError("quantization axis is not unit-norm");
}

bool PolarizationGeometry::is_transverse(double tol) const {
  return std::abs(epsilon.dot(eta.cast<std::complex<double>>())) < tol;
}

std::array<std::complex<double>, 3> spherical_components(const Eigen::Vector3cd& v, const Eigen::Vector3d& axis) {
  const Eigen::Vector3cd local = frame_for_axis(axis).cast<std::complex<double>>() * v;
  const std::complex<double> i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  return {(local.x() - i * local.y()) * r, local.z(), -(local.x() + i * local.y()) * r};
}

std::complex<double> tensor_rank1(int q, const PolarizationGeometry& geom) {
  if (q < -1 || q > 1) throw NumericalError("rank-1 component q out of range: " + std::to_string(q));
  return spherical_components(geom.epsilon, geom.b_axis)[static_cast<std::size_t>(q + 1)];
}

std::complex<double> tensor_rank2(int q, const PolarizationGeometry& geom) {
  if (q < -2 || q > 2) throw NumericalError("rank-2 component q out of range: " + std::to_string(q));
  const auto e = spherical_components(geom.epsilon, geom.b_axis);
  const auto k = spherical_components(geom.eta.cast<std::complex<double>>(), geom.b_axis);
  const HalfInteger one(1);
  std::complex<double> sum = 0.0;
  for (int q1 = -1; q1 <= 1; ++q1) {
    const int q2 = q - q1;
    if (q2 < -1 || q2 > 1) continue;
    const double cg = clebsch_gordan(one, HalfInteger(q1), one, HalfInteger(q2), HalfInteger(2), HalfInteger(q));
    sum += cg * e[static_cast<std::size_t>(q1 + 1)] * k[static_cast<std::size_t>(q2 + 1)];
  }
  return sum;
}

}  // namespace ionmcmr
