#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>

#include "srbmpc/config.hpp"
#include "srbmpc/rotation.hpp"

namespace srbmpc {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Vec13 = Eigen::Matrix<double, 13, 1>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat13 = Eigen::Matrix<double, 13, 13>;
using Mat13x12 = Eigen::Matrix<double, 13, 12>;

inline constexpr int kNumFeet = 2;
inline constexpr int kStateDim = 13;  // [p, rpy, pdot, omega, 1]
inline constexpr int kInputDim = 12;  // [F0, F1, M0, M1]

/// Rigid-body state with the constant 13th entry used to carry affine
/// terms (gravity, constant residual accelerations) in state-space form.
struct RobotState {
  Vec3 position = Vec3::Zero();
  Vec3 orientation = Vec3::Zero();  // roll, pitch, yaw (Z-Y-X convention)
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();  // world frame

  Vec13 as_vector() const {
    Vec13 x;
    x << position, orientation, linear_velocity, angular_velocity, 1.0;
    return x;
  }

  static RobotState from_vector(const Vec13& x) {
    RobotState s;
    s.position = x.segment<3>(0);
    s.orientation = x.segment<3>(3);
    s.linear_velocity = x.segment<3>(6);
    s.angular_velocity = x.segment<3>(9);
    return s;
  }

  bool finite() const {
    return position.allFinite() && orientation.allFinite() && linear_velocity.allFinite() &&
           angular_velocity.allFinite();
  }

  Mat3 rotation() const { return rot_zyx(orientation); }
  double yaw() const { return orientation.z(); }
};

/// Per-foot ground reaction force and moment; the MPC decision output.
/// A foot out of contact carries an identically zero wrench.
struct ContactWrench {
  std::array<Vec3, kNumFeet> force = {Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, kNumFeet> moment = {Vec3::Zero(), Vec3::Zero()};

  Vec12 stacked() const {
    Vec12 u;
    u << force[0], force[1], moment[0], moment[1];
    return u;
  }

  static ContactWrench from_stacked(const Vec12& u) {
    ContactWrench w;
    w.force[0] = u.segment<3>(0);
    w.force[1] = u.segment<3>(3);
    w.moment[0] = u.segment<3>(6);
    w.moment[1] = u.segment<3>(9);
    return w;
  }

  bool finite() const {
    for (int i = 0; i < kNumFeet; ++i) {
      if (!force[i].allFinite() || !moment[i].allFinite()) return false;
    }
    return true;
  }
};

/// Lumped-mass model parameters used by the controller.
struct SrbdParams {
  double mass = 13.856;                         // kg
  Mat3 inertia = make_default_inertia();        // body frame, kg m^2
  double friction = 0.5;                        // pyramid coefficient
  double force_max = 500.0;                     // vertical force cap, N
  double toe_length = 0.07;                     // m
  double heel_length = 0.04;                    // m
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);         // m/s^2

  static Mat3 make_default_inertia() {
    return Vec3(0.5413, 0.52, 0.0691).asDiagonal();
  }

  void validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("SrbdParams: mass must be > 0");
    if (!(friction > 0.0)) throw std::invalid_argument("SrbdParams: friction must be > 0");
    if (!(force_max > 0.0)) throw std::invalid_argument("SrbdParams: force_max must be > 0");
    if (!(toe_length > 0.0) || !(heel_length > 0.0)) {
      throw std::invalid_argument("SrbdParams: toe/heel lengths must be > 0");
    }
    if (!inertia.allFinite() || (inertia - inertia.transpose()).norm() > 1e-9) {
      throw std::invalid_argument("SrbdParams: inertia must be finite and symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("SrbdParams: inertia must be positive definite");
    }
  }

  static SrbdParams from_config(const Config& c) {
    SrbdParams p;
    p.mass = c.get_double("srbd.mass", p.mass);
    const auto inertia_diag =
        c.get_doubles("srbd.inertia_diag", {0.5413, 0.52, 0.0691});
    if (inertia_diag.size() != 3) {
      throw std::runtime_error("srbd.inertia_diag: expected 3 values");
    }
    p.inertia = Vec3(inertia_diag[0], inertia_diag[1], inertia_diag[2]).asDiagonal();
    p.friction = c.get_double("srbd.friction", p.friction);
    p.force_max = c.get_double("srbd.force_max", p.force_max);
    p.toe_length = c.get_double("srbd.toe_length", p.toe_length);
    p.heel_length = c.get_double("srbd.heel_length", p.heel_length);
    p.gravity.z() = c.get_double("srbd.gravity_z", p.gravity.z());
    p.validate();
    return p;
  }
};

/// Acceleration-level residual terms: constant offsets plus diagonal
/// input-proportional gains on the summed foot forces/moments.
struct ResidualDynamics {
  Vec3 lin_acc = Vec3::Zero();   // m/s^2
  Vec3 ang_acc = Vec3::Zero();   // rad/s^2
  Vec3 lin_gain = Vec3::Zero();  // 1/kg, multiplies sum of forces
  Vec3 ang_gain = Vec3::Zero();  // 1/(kg m^2), multiplies sum of moments

  bool is_zero() const {
    return lin_acc.isZero(0.0) && ang_acc.isZero(0.0) && lin_gain.isZero(0.0) &&
           ang_gain.isZero(0.0);
  }

  bool finite() const {
    return lin_acc.allFinite() && ang_acc.allFinite() && lin_gain.allFinite() &&
           ang_gain.allFinite();
  }
};

/// Continuous- and discrete-time state-space matrices around one state.
/// Kinematic rows of B are zero; A_d = I + A_c dt, B_d = B_c dt.
struct LinearizedDynamics {
  Mat13 a_continuous = Mat13::Zero();
  Mat13x12 b_continuous = Mat13x12::Zero();
  Mat13 a_discrete = Mat13::Zero();
  Mat13x12 b_discrete = Mat13x12::Zero();
  double dt = 0.0;
};

}  // namespace srbmpc
