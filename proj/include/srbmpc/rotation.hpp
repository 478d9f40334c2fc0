#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace srbmpc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

inline Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

inline Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

inline Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

/// Body-to-world rotation for Z-Y-X Euler angles, rpy = (roll, pitch, yaw).
inline Mat3 rot_zyx(const Vec3& rpy) {
  return rot_z(rpy.z()) * rot_y(rpy.y()) * rot_x(rpy.x());
}

inline bool euler_mapping_singular(const Vec3& rpy) {
  return std::abs(std::cos(rpy.y())) < 1e-8;
}

/// Maps world-frame angular velocity to Z-Y-X Euler angle rates:
/// rpy_dot = euler_rate_map(rpy) * omega_world. Singular at |pitch| = pi/2.
inline Mat3 euler_rate_map(const Vec3& rpy) {
  if (euler_mapping_singular(rpy)) {
    throw std::domain_error("euler_rate_map: pitch at +/-pi/2, mapping singular");
  }
  const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
  const double cp = std::cos(rpy.y()), tp = std::tan(rpy.y());
  Mat3 m;
  m << cy / cp, sy / cp, 0.0,         //
      -sy, cy, 0.0,                   //
      cy * tp, sy * tp, 1.0;
  return m;
}

/// d(euler_rate_map(rpy) * omega)/d(rpy) at fixed omega. Column order
/// (roll, pitch, yaw); the map does not depend on roll, so column 0 is zero.
inline Mat3 euler_rate_map_jacobian(const Vec3& rpy, const Vec3& omega) {
  if (euler_mapping_singular(rpy)) {
    throw std::domain_error("euler_rate_map_jacobian: pitch at +/-pi/2");
  }
  const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
  const double cp = std::cos(rpy.y()), sp = std::sin(rpy.y());
  const double cp2 = cp * cp;

  Mat3 d_pitch;
  d_pitch << cy * sp / cp2, sy * sp / cp2, 0.0,  //
      0.0, 0.0, 0.0,                             //
      cy / cp2, sy / cp2, 0.0;

  Mat3 d_yaw;
  d_yaw << -sy / cp, cy / cp, 0.0,  //
      -cy, -sy, 0.0,                //
      -sy * sp / cp, cy * sp / cp, 0.0;

  Mat3 j = Mat3::Zero();
  j.col(1) = d_pitch * omega;
  j.col(2) = d_yaw * omega;
  return j;
}

inline double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace srbmpc
