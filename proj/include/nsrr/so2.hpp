#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "nsrr/errors.hpp"

namespace nsrr {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = std::numbers::pi;

/// Absolute tolerance for orthogonality / determinant validation. Rotation
/// matrices here come out of floating-point SVD factors, so exactness is
/// unattainable.
inline constexpr double kOrthoTol = 1e-9;

/// Wrap an angle to the half-open interval (-pi, pi].
inline double wrap_angle(double radians) {
  double r = std::remainder(radians, 2.0 * kPi);
  if (r <= -kPi) {
    r = kPi;
  }
  return r;
}

/// Scalar angle in radians, always wrapped to (-pi, pi].
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians) : value_(wrap_angle(radians)) {}

  double radians() const { return value_; }

  Angle operator-() const { return Angle(-value_); }
  friend Angle operator+(Angle a, Angle b) { return Angle(a.value_ + b.value_); }
  friend Angle operator-(Angle a, Angle b) { return Angle(a.value_ - b.value_); }

 private:
  double value_ = 0.0;
};

/// Rotation matrix [[cos t, -sin t], [sin t, cos t]].
inline Mat2 rot(Angle theta) {
  const double c = std::cos(theta.radians());
  const double s = std::sin(theta.radians());
  Mat2 m;
  m << c, -s, s, c;
  return m;
}

inline Mat2 rot(double theta_radians) { return rot(Angle(theta_radians)); }

/// Reflection about the line through the origin at angle phi:
/// [[cos 2p, sin 2p], [sin 2p, -cos 2p]].
inline Mat2 refl(Angle phi) {
  const double c = std::cos(2.0 * phi.radians());
  const double s = std::sin(2.0 * phi.radians());
  Mat2 m;
  m << c, s, s, -c;
  return m;
}

inline Mat2 refl(double phi_radians) { return refl(Angle(phi_radians)); }

inline bool is_orthogonal(const Mat2& m, double tol = kOrthoTol) {
  return m.allFinite() &&
         (m.transpose() * m - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_rotation(const Mat2& m, double tol = kOrthoTol) {
  return is_orthogonal(m, tol) && std::abs(m.determinant() - 1.0) <= tol;
}

inline bool is_reflection(const Mat2& m, double tol = kOrthoTol) {
  return is_orthogonal(m, tol) && std::abs(m.determinant() + 1.0) <= tol;
}

/// Rotation angle of a rotation matrix, wrapped to (-pi, pi].
/// Throws DataError if the input is not a rotation within `tol`.
inline Angle angle_of(const Mat2& m, double tol = kOrthoTol) {
  if (!is_rotation(m, tol)) {
    throw DataError("angle_of: input is not a rotation matrix");
  }
  return Angle(std::atan2(m(1, 0), m(0, 0)));
}

/// O^T * P * O for orthogonal O and rotation P. Equals P when det(O) = +1
/// and P^T when det(O) = -1.
inline Mat2 conjugate(const Mat2& orthogonal, const Mat2& rotation,
                      double tol = kOrthoTol) {
  if (!is_orthogonal(orthogonal, tol)) {
    throw DataError("conjugate: first operand is not orthogonal");
  }
  if (!is_rotation(rotation, tol)) {
    throw DataError("conjugate: second operand is not a rotation");
  }
  return orthogonal.transpose() * rotation * orthogonal;
}

}  // namespace nsrr
