#pragma once

#include <atomic>
#include <iostream>
#include <stdexcept>
#include <utility>

#include "srbmpc/rotation.hpp"

namespace srbmpc {

struct SwingParams {
  double nominal_height = 0.1;       // m, apex above the liftoff point
  double apex_offset = 0.0;          // m, learned apex residual
  double control_point_shift = 0.0;  // learned shift along the step direction
};

/// Raibert target: hip_ref + 1/2 v dT + k_d (v - v_ref), with the vertical
/// component pinned to the stance height (the controller is blind and plans
/// flat; the plant resolves the true contact height).
inline Vec3 raibert_foothold(const Vec3& hip_ref, const Vec3& com_vel, const Vec3& ref_vel,
                             double remaining_time, double stance_height, double k_d = 0.05) {
  if (!(remaining_time >= 0.0)) {
    throw std::invalid_argument("raibert_foothold: remaining_time must be >= 0");
  }
  Vec3 target = hip_ref + 0.5 * remaining_time * com_vel + k_d * (com_vel - ref_vel);
  target.z() = stance_height;
  return target;
}

/// Control points of the swing curve: thirds of the step vector shifted by
/// the control-point coefficient, with both interior z set so the curve
/// passes through the apex height at mid-swing:
///   c1 = p0 + (1/3 + shift)(pf - p0),  c2 = p0 + (2/3 + shift)(pf - p0),
///   c1z = c2z = (8 h - p0z - pfz) / 6,  h = p0z + h_nom + dh.
inline std::pair<Vec3, Vec3> bezier_control_points(const Vec3& liftoff, const Vec3& foothold,
                                                   const SwingParams& sp) {
  const Vec3 delta = foothold - liftoff;
  Vec3 c1 = liftoff + (1.0 / 3.0 + sp.control_point_shift) * delta;
  Vec3 c2 = liftoff + (2.0 / 3.0 + sp.control_point_shift) * delta;
  const double apex = liftoff.z() + sp.nominal_height + sp.apex_offset;
  const double interior_z = (8.0 * apex - liftoff.z() - foothold.z()) / 6.0;
  c1.z() = interior_z;
  c2.z() = interior_z;
  return {c1, c2};
}

struct SwingTrajectory {
  Vec3 start = Vec3::Zero();
  Vec3 control1 = Vec3::Zero();
  Vec3 control2 = Vec3::Zero();
  Vec3 target = Vec3::Zero();

  static SwingTrajectory make(const Vec3& liftoff, const Vec3& foothold,
                              const SwingParams& sp) {
    const auto [c1, c2] = bezier_control_points(liftoff, foothold, sp);
    return {liftoff, c1, c2, foothold};
  }

  double apex_height() const { return (control1.z() * 6.0 + start.z() + target.z()) / 8.0; }
};

namespace detail {
inline std::atomic<bool> swing_phase_warned{false};
}

/// Cubic Bezier position and velocity at phase phi in [0, 1]; the velocity
/// is d/dphi divided by the swing duration. Out-of-range phases are clamped
/// (warned once per process).
inline std::pair<Vec3, Vec3> swing_reference(const SwingTrajectory& tr, double phi,
                                             double swing_duration) {
  if (phi < 0.0 || phi > 1.0) {
    if (!detail::swing_phase_warned.exchange(true)) {
      std::cerr << "swing_reference: phase " << phi << " outside [0,1], clamping\n";
    }
    phi = std::clamp(phi, 0.0, 1.0);
  }
  if (!(swing_duration > 0.0)) {
    throw std::invalid_argument("swing_reference: swing_duration must be > 0");
  }
  const double t = phi, o = 1.0 - phi;
  const Vec3 pos = (o * o * o) * tr.start + (3.0 * o * o * t) * tr.control1 +
                   (3.0 * o * t * t) * tr.control2 + (t * t * t) * tr.target;
  const Vec3 dpos = (3.0 * o * o) * (tr.control1 - tr.start) +
                    (6.0 * o * t) * (tr.control2 - tr.control1) +
                    (3.0 * t * t) * (tr.target - tr.control2);
  return {pos, dpos / swing_duration};
}

}  // namespace srbmpc
