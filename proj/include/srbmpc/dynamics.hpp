#pragma once

#include <array>
#include <stdexcept>

#include "srbmpc/types.hpp"

namespace srbmpc {

using FootPositions = std::array<Vec3, kNumFeet>;  // CoM-to-contact vectors, world frame

namespace detail {

inline void check_dynamics_inputs(const RobotState& x, const SrbdParams& params) {
  if (!x.finite()) throw std::invalid_argument("dynamics: non-finite state");
  params.validate();
  if (euler_mapping_singular(x.orientation)) {
    throw std::domain_error("dynamics: |pitch| >= pi/2, Euler rate mapping singular");
  }
}

inline Mat3 world_inertia(const RobotState& x, const SrbdParams& params) {
  const Mat3 r = x.rotation();
  return r * params.inertia * r.transpose();
}

}  // namespace detail

/// Time derivative of the augmented 13-state under per-foot contact
/// wrenches. `feet` are vectors from the CoM to the contact points in the
/// world frame. The residual adds constant and input-proportional terms to
/// the acceleration rows; the 13th (constant) entry has zero derivative.
inline Vec13 continuous_dynamics(const RobotState& x, const ContactWrench& u,
                                 const FootPositions& feet, const SrbdParams& params,
                                 const ResidualDynamics& res = {}) {
  detail::check_dynamics_inputs(x, params);
  if (!u.finite() || !res.finite()) {
    throw std::invalid_argument("continuous_dynamics: non-finite input");
  }
  for (const auto& r : feet) {
    if (!r.allFinite()) throw std::invalid_argument("continuous_dynamics: non-finite foot");
  }

  const Vec3 force_sum = u.force[0] + u.force[1];
  const Vec3 moment_sum = u.moment[0] + u.moment[1];
  Vec3 torque = Vec3::Zero();
  for (int i = 0; i < kNumFeet; ++i) torque += feet[i].cross(u.force[i]) + u.moment[i];

  const Mat3 inertia_w = detail::world_inertia(x, params);

  // Nominal rows first, residual contributions added on top; with a zero
  // residual the additions leave the nominal evaluation bit-intact.
  Vec13 dx;
  dx.segment<3>(0) = x.linear_velocity;
  dx.segment<3>(3) = euler_rate_map(x.orientation) * x.angular_velocity;
  dx.segment<3>(6) = force_sum / params.mass + params.gravity;
  dx.segment<3>(9) = inertia_w.inverse() * torque;
  dx(12) = 0.0;
  dx.segment<3>(6) += res.lin_acc;
  dx.segment<3>(6) += res.lin_gain.asDiagonal() * force_sum;
  dx.segment<3>(9) += res.ang_acc;
  dx.segment<3>(9) += res.ang_gain.asDiagonal() * moment_sum;
  return dx;
}

/// First-order expansion of the nominal dynamics at (x, u = 0) with foot
/// vectors held fixed. Affine remainders (gravity, the Euler-rate expansion
/// constant) are routed through the constant-state column so that
/// A_c x + B_c u reproduces the nonlinear derivative exactly at the
/// expansion point and to second order nearby.
inline LinearizedDynamics linearize_nominal(const RobotState& x, const FootPositions& feet,
                                            const SrbdParams& params) {
  detail::check_dynamics_inputs(x, params);

  const Mat3 rate_map = euler_rate_map(x.orientation);
  const Mat3 rate_jac = euler_rate_map_jacobian(x.orientation, x.angular_velocity);
  const Mat3 inertia_w_inv = detail::world_inertia(x, params).inverse();

  LinearizedDynamics ld;
  Mat13& a = ld.a_continuous;
  Mat13x12& b = ld.b_continuous;

  a.block<3, 3>(0, 6).setIdentity();
  a.block<3, 3>(3, 3) = rate_jac;
  a.block<3, 3>(3, 9) = rate_map;
  a.block<3, 1>(3, 12) = -rate_jac * x.orientation;
  a.block<3, 1>(6, 12) = params.gravity;

  for (int i = 0; i < kNumFeet; ++i) {
    b.block<3, 3>(6, 3 * i) = Mat3::Identity() / params.mass;
    b.block<3, 3>(9, 3 * i) = inertia_w_inv * skew(feet[i]);
    b.block<3, 3>(9, 6 + 3 * i) = inertia_w_inv;
  }
  return ld;
}

/// Same expansion with the residual terms injected: constants into the
/// constant-state column, diagonal gains onto the force/moment blocks of B.
inline LinearizedDynamics linearize(const RobotState& x, const FootPositions& feet,
                                    const SrbdParams& params, const ResidualDynamics& res) {
  if (!res.finite()) throw std::invalid_argument("linearize: non-finite residual");
  LinearizedDynamics ld = linearize_nominal(x, feet, params);
  ld.a_continuous.block<3, 1>(6, 12) += res.lin_acc;
  ld.a_continuous.block<3, 1>(9, 12) += res.ang_acc;
  for (int i = 0; i < kNumFeet; ++i) {
    ld.b_continuous.block<3, 3>(6, 3 * i).diagonal() += res.lin_gain;
    ld.b_continuous.block<3, 3>(9, 6 + 3 * i).diagonal() += res.ang_gain;
  }
  return ld;
}

/// Forward-Euler discretization: A_d = I + A_c dt, B_d = B_c dt.
/// dt = 0 is the identity limit; negative dt is rejected.
inline LinearizedDynamics discretize(LinearizedDynamics ld, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("discretize: dt must be >= 0");
  ld.a_discrete = Mat13::Identity() + ld.a_continuous * dt;
  ld.b_discrete = ld.b_continuous * dt;
  ld.dt = dt;
  return ld;
}

}  // namespace srbmpc
