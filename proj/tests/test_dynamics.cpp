#include "srbmpc/dynamics.hpp"

#include <gtest/gtest.h>

#include <cstring>

#include "test_util.hpp"

namespace srbmpc {
namespace {

using testing::Rng;
using testing::random_feet;
using testing::random_residual;
using testing::random_state;
using testing::random_wrench;
using testing::uniform;
using testing::uniform_vec3;

FootPositions stance_feet() {
  return {Vec3(0.0, 0.1, -0.55), Vec3(0.0, -0.1, -0.55)};
}

TEST(EulerRates, MapMatchesRotationDerivative) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 rpy(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, -M_PI, M_PI));
    const Vec3 omega = uniform_vec3(rng, -1.0, 1.0);
    const Vec3 rpy_dot = euler_rate_map(rpy) * omega;
    const double h = 1e-6;
    // World angular velocity: Rdot = skew(omega) * R.
    const Mat3 r_pred = rot_zyx(rpy) + h * skew(omega) * rot_zyx(rpy);
    const Mat3 r_step = rot_zyx(rpy + h * rpy_dot);
    EXPECT_LT((r_pred - r_step).norm(), 1e-9);
  }
}

TEST(EulerRates, JacobianMatchesFiniteDifferences) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 rpy(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, -M_PI, M_PI));
    const Vec3 omega = uniform_vec3(rng, -1.0, 1.0);
    const Mat3 jac = euler_rate_map_jacobian(rpy, omega);
    const double h = 1e-7;
    for (int j = 0; j < 3; ++j) {
      Vec3 hi = rpy, lo = rpy;
      hi(j) += h;
      lo(j) -= h;
      const Vec3 fd = (euler_rate_map(hi) * omega - euler_rate_map(lo) * omega) / (2 * h);
      EXPECT_LT((jac.col(j) - fd).norm(), 1e-6);
    }
  }
}

TEST(ContinuousDynamics, FreeFall) {
  RobotState x;
  x.position = Vec3(0, 0, 0.55);
  const Vec13 dx = continuous_dynamics(x, ContactWrench{}, stance_feet(), SrbdParams{});
  EXPECT_EQ(dx.segment<3>(6), Vec3(0, 0, -9.81));
  EXPECT_EQ(dx.segment<3>(9), Vec3::Zero());
  EXPECT_EQ(dx(12), 0.0);
}

TEST(ContinuousDynamics, StaticEquilibriumThroughCom) {
  SrbdParams params;
  RobotState x;
  x.position = Vec3(0, 0, 0.55);
  ContactWrench u;
  u.force[0] = Vec3(0, 0, params.mass * 9.81);
  FootPositions feet = {Vec3(0, 0, -0.55), Vec3(0, 0, -0.55)};
  const Vec13 dx = continuous_dynamics(x, u, feet, params);
  EXPECT_LT(dx.segment<3>(6).norm(), 1e-12);
  EXPECT_LT(dx.segment<3>(9).norm(), 1e-12);
}

TEST(ContinuousDynamics, ResidualAddsConstantOffset) {
  SrbdParams params;
  RobotState x;
  x.position = Vec3(0, 0, 0.55);
  ContactWrench u;
  u.force[0] = Vec3(0, 0, params.mass * 9.81);
  FootPositions feet = {Vec3(0, 0, -0.55), Vec3(0, 0, -0.55)};
  ResidualDynamics res;
  res.lin_acc = Vec3(0, 0, 1.0);
  const Vec13 base = continuous_dynamics(x, u, feet, params);
  const Vec13 aug = continuous_dynamics(x, u, feet, params, res);
  EXPECT_DOUBLE_EQ(aug(8) - base(8), 1.0);
  EXPECT_NEAR(aug(8), 1.0, 1e-12);
}

TEST(ContinuousDynamics, ZeroResidualBitExact) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const RobotState x = random_state(rng);
    const ContactWrench u = random_wrench(rng);
    const FootPositions feet = random_feet(rng);
    const SrbdParams params;
    const Vec13 with_zero = continuous_dynamics(x, u, feet, params, ResidualDynamics{});
    // Nominal evaluation written out directly.
    const Vec3 force_sum = u.force[0] + u.force[1];
    Vec3 torque = Vec3::Zero();
    for (int i = 0; i < kNumFeet; ++i) torque += feet[i].cross(u.force[i]) + u.moment[i];
    const Mat3 r = x.rotation();
    const Mat3 inertia_w = r * params.inertia * r.transpose();
    Vec13 nominal;
    nominal.segment<3>(0) = x.linear_velocity;
    nominal.segment<3>(3) = euler_rate_map(x.orientation) * x.angular_velocity;
    nominal.segment<3>(6) = force_sum / params.mass + params.gravity;
    nominal.segment<3>(9) = inertia_w.inverse() * torque;
    nominal(12) = 0.0;
    EXPECT_EQ(0, std::memcmp(with_zero.data(), nominal.data(), sizeof(double) * 13));
  }
}

TEST(ContinuousDynamics, RejectsBadInputs) {
  RobotState x;
  x.position = Vec3(0, 0, 0.55);
  RobotState nan_state = x;
  nan_state.linear_velocity.x() = std::nan("");
  EXPECT_THROW(continuous_dynamics(nan_state, {}, stance_feet(), {}), std::invalid_argument);
  RobotState gimbal = x;
  gimbal.orientation.y() = M_PI / 2;
  EXPECT_THROW(continuous_dynamics(gimbal, {}, stance_feet(), {}), std::domain_error);
}

TEST(Linearize, ForceBlockIsInverseMass) {
  SrbdParams params;
  RobotState x;
  x.position = Vec3(0, 0, 0.55);
  const LinearizedDynamics ld = linearize_nominal(x, stance_feet(), params);
  for (int i = 0; i < kNumFeet; ++i) {
    const Mat3 block = ld.b_continuous.block<3, 3>(6, 3 * i);
    EXPECT_LT((block - Mat3::Identity() / params.mass).norm(), 1e-15);
  }
  // Kinematic rows carry no input feedthrough.
  EXPECT_EQ(ld.b_continuous.topRows<6>().norm(), 0.0);
}

TEST(Linearize, LinearGainShiftsForceBlock) {
  SrbdParams params;
  RobotState x;
  x.position = Vec3(0, 0, 0.55);
  const double gain = 0.003;
  ResidualDynamics res;
  res.lin_gain = Vec3::Constant(gain);
  const LinearizedDynamics base = linearize_nominal(x, stance_feet(), params);
  const LinearizedDynamics aug = linearize(x, stance_feet(), params, res);
  for (int i = 0; i < kNumFeet; ++i) {
    const Mat3 expected =
        Mat3(base.b_continuous.block<3, 3>(6, 3 * i)) + gain * Mat3::Identity();
    EXPECT_LT((Mat3(aug.b_continuous.block<3, 3>(6, 3 * i)) - expected).norm(), 1e-15);
  }
}

TEST(Linearize, ZeroResidualBitIdenticalToNominalPath) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const RobotState x = random_state(rng);
    const FootPositions feet = random_feet(rng);
    const SrbdParams params;
    const LinearizedDynamics nominal = linearize_nominal(x, feet, params);
    const LinearizedDynamics zeroed = linearize(x, feet, params, ResidualDynamics{});
    EXPECT_EQ(0, std::memcmp(nominal.a_continuous.data(), zeroed.a_continuous.data(),
                             sizeof(double) * 13 * 13));
    EXPECT_EQ(0, std::memcmp(nominal.b_continuous.data(), zeroed.b_continuous.data(),
                             sizeof(double) * 13 * 12));
  }
}

TEST(Linearize, ExactAtExpansionPoint) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const RobotState x = random_state(rng);
    const FootPositions feet = random_feet(rng);
    const ContactWrench u = random_wrench(rng);
    const ResidualDynamics res = random_residual(rng);
    const SrbdParams params;
    const LinearizedDynamics ld = linearize(x, feet, params, res);
    const Vec13 linear = ld.a_continuous * x.as_vector() + ld.b_continuous * u.stacked();
    const Vec13 exact = continuous_dynamics(x, u, feet, params, res);
    EXPECT_LT((linear - exact).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(Linearize, SecondOrderErrorDecay) {
  Rng rng(19);
  const SrbdParams params;
  for (int trial = 0; trial < 20; ++trial) {
    const RobotState x = random_state(rng);
    const FootPositions feet = random_feet(rng);
    const LinearizedDynamics ld = linearize_nominal(x, feet, params);
    double err_full = 0.0, err_half = 0.0;
    for (int dir = 0; dir < 12; ++dir) {
      Vec12 dx_dir = Vec12::Zero();
      for (int i = 0; i < 12; ++i) dx_dir(i) = uniform(rng, -1.0, 1.0);
      Vec12 du_dir;
      for (int i = 0; i < 12; ++i) du_dir(i) = uniform(rng, -1.0, 1.0);
      for (const double delta : {1e-3, 5e-4}) {
        Vec13 xv = x.as_vector();
        xv.segment<12>(0) += delta * dx_dir;
        const RobotState xp = RobotState::from_vector(xv);
        const ContactWrench up = ContactWrench::from_stacked(delta * du_dir);
        const Vec13 pred = ld.a_continuous * xv + ld.b_continuous * up.stacked();
        const Vec13 exact = continuous_dynamics(xp, up, feet, params);
        const double err = (pred - exact).lpNorm<Eigen::Infinity>();
        (delta == 1e-3 ? err_full : err_half) = std::max(delta == 1e-3 ? err_full : err_half, err);
      }
    }
    const double ratio = err_full / err_half;
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
  }
}

TEST(Linearize, InputJacobianMatchesFiniteDifferences) {
  Rng rng(23);
  const SrbdParams params;
  for (int trial = 0; trial < 10; ++trial) {
    const RobotState x = random_state(rng);
    const FootPositions feet = random_feet(rng);
    const ResidualDynamics res = random_residual(rng);
    const LinearizedDynamics ld = linearize(x, feet, params, res);
    const double h = 1e-4;
    for (int j = 0; j < 12; ++j) {
      Vec12 e = Vec12::Zero();
      e(j) = h;
      const Vec13 hi =
          continuous_dynamics(x, ContactWrench::from_stacked(e), feet, params, res);
      const Vec13 lo =
          continuous_dynamics(x, ContactWrench::from_stacked(-e), feet, params, res);
      const Vec13 fd = (hi - lo) / (2 * h);
      const Vec13 col = ld.b_continuous.col(j);
      const double scale = std::max(1.0, col.lpNorm<Eigen::Infinity>());
      EXPECT_LT((fd - col).lpNorm<Eigen::Infinity>() / scale, 1e-6);
    }
  }
}

TEST(Discretize, IdentityLimitAndFormula) {
  Rng rng(29);
  const RobotState x = random_state(rng);
  const SrbdParams params;
  LinearizedDynamics ld = linearize_nominal(x, random_feet(rng), params);

  const LinearizedDynamics at_zero = discretize(ld, 0.0);
  EXPECT_EQ(at_zero.a_discrete, Mat13::Identity());
  EXPECT_EQ(at_zero.b_discrete.norm(), 0.0);

  LinearizedDynamics no_drift;
  const LinearizedDynamics id = discretize(no_drift, 0.025);
  EXPECT_EQ(id.a_discrete, Mat13::Identity());

  const double dt = 0.025;
  const LinearizedDynamics d = discretize(ld, dt);
  EXPECT_LT((d.a_discrete - Mat13::Identity() - dt * ld.a_continuous).norm(), 1e-15);
  EXPECT_LT((d.b_discrete - dt * ld.b_continuous).norm(), 1e-15);
  EXPECT_THROW(discretize(ld, -0.01), std::invalid_argument);
}

TEST(Params, ValidationAndConfigLoad) {
  SrbdParams bad;
  bad.mass = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);

  const auto cfg = Config::from_string(
      "srbd.mass = 10.0\n"
      "srbd.inertia_diag = 0.4, 0.5, 0.06\n"
      "srbd.friction = 0.7\n");
  const SrbdParams p = SrbdParams::from_config(cfg);
  EXPECT_DOUBLE_EQ(p.mass, 10.0);
  EXPECT_DOUBLE_EQ(p.inertia(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(p.friction, 0.7);
  EXPECT_DOUBLE_EQ(p.force_max, 500.0);
}

}  // namespace
}  // namespace srbmpc
