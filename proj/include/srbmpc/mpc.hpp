#pragma once

#include <array>
#include <vector>

#include "srbmpc/dynamics.hpp"
#include "srbmpc/gait.hpp"
#include "srbmpc/qp.hpp"

namespace srbmpc {

struct MpcWeights {
  // Tracking weights over [p, rpy, pdot, omega, const].
  Vec13 state_weight = make_default_state_weight();
  Vec3 force_weight = Vec3::Constant(1e-5);
  Vec3 moment_weight = Vec3::Constant(1e-4);

  static Vec13 make_default_state_weight() {
    Vec13 q;
    q << 150, 150, 250, 100, 100, 250, 1, 1, 1, 10, 10, 1, 1;
    return q;
  }

  static MpcWeights from_config(const Config& c) {
    MpcWeights w;
    const auto q = c.get_doubles("mpc.state_weight", {});
    if (!q.empty()) {
      if (q.size() != 13) throw std::runtime_error("mpc.state_weight: expected 13 values");
      for (int i = 0; i < 13; ++i) w.state_weight(i) = q[size_t(i)];
    }
    w.force_weight = Vec3::Constant(c.get_double("mpc.force_weight", 1e-5));
    w.moment_weight = Vec3::Constant(c.get_double("mpc.moment_weight", 1e-4));
    if ((w.state_weight.array() < 0).any() || (w.force_weight.array() < 0).any() ||
        (w.moment_weight.array() < 0).any()) {
      throw std::runtime_error("MpcWeights: weights must be >= 0");
    }
    return w;
  }
};

struct MpcConfig {
  int horizon = 10;
  double dt_nominal = 0.025;

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("MpcConfig: horizon must be >= 1");
    if (!(dt_nominal > 0)) throw std::invalid_argument("MpcConfig: dt_nominal must be > 0");
  }

  static MpcConfig from_config(const Config& c) {
    MpcConfig m;
    m.horizon = c.get_int("mpc.horizon", m.horizon);
    m.dt_nominal = c.get_double("mpc.dt_nominal", m.dt_nominal);
    m.validate();
    return m;
  }
};

struct ReferenceTrajectory {
  std::vector<Vec13> states;  // x_ref for steps 1..H

  int horizon() const { return int(states.size()); }
};

/// Reference: positions integrated from the commanded planar velocity
/// (body-frame vx, vy plus yaw rate), yaw integrated at the commanded rate,
/// flat roll/pitch, fixed height.
inline ReferenceTrajectory make_reference(const RobotState& x0, const Vec3& command,
                                          double height_ref, int horizon, double dt) {
  ReferenceTrajectory ref;
  ref.states.resize(size_t(horizon));
  double yaw = x0.yaw();
  Vec3 pos = x0.position;
  for (int k = 0; k < horizon; ++k) {
    yaw += command.z() * dt;
    const Vec3 vel_world = rot_z(yaw) * Vec3(command.x(), command.y(), 0.0);
    pos += vel_world * dt;
    Vec13& xr = ref.states[size_t(k)];
    xr << pos.x(), pos.y(), height_ref, 0.0, 0.0, yaw, vel_world.x(), vel_world.y(), 0.0,
        0.0, 0.0, command.z(), 1.0;
  }
  return ref;
}

/// Index layout of the MPC decision vector. Steps are interleaved as
/// [u_0, x_1, u_1, x_2, ...]; a step's wrench block holds 6 variables
/// ([F; M]) per foot in contact, swing feet are eliminated.
struct MpcLayout {
  int horizon = 0;
  int num_vars = 0;
  int num_ineq = 0;
  std::vector<std::array<int, 2>> foot_offset;  // -1 when not in contact
  std::vector<int> state_offset;                // offset of x_{k+1}

  static MpcLayout make(const ContactSchedule& schedule) {
    MpcLayout l;
    l.horizon = schedule.horizon();
    l.foot_offset.resize(size_t(l.horizon));
    l.state_offset.resize(size_t(l.horizon));
    int offset = 0;
    for (int k = 0; k < l.horizon; ++k) {
      for (int i = 0; i < kNumFeet; ++i) {
        if (schedule.stance[size_t(k)][size_t(i)]) {
          l.foot_offset[size_t(k)][size_t(i)] = offset;
          offset += 6;
          l.num_ineq += 8;
        } else {
          l.foot_offset[size_t(k)][size_t(i)] = -1;
        }
      }
      l.state_offset[size_t(k)] = offset;
      offset += kStateDim;
    }
    l.num_vars = offset;
    return l;
  }
};

/// Transcribes the tracking problem over the horizon into standard QP form:
/// discrete dynamics as equalities, friction pyramid, vertical force
/// saturation and toe/heel line-contact bounds as inequalities (8 rows per
/// contact per step). Swing-foot wrenches are eliminated from the decision
/// vector, which enforces the contact gating exactly.
inline QpProblem build_problem(const RobotState& x0, const ReferenceTrajectory& ref,
                               const ContactSchedule& schedule, const LinearizedDynamics& ld,
                               const std::array<Mat3, kNumFeet>& foot_rotation,
                               const SrbdParams& params, const MpcWeights& weights) {
  const int horizon = schedule.horizon();
  if (ref.horizon() != horizon) {
    throw std::invalid_argument("build_problem: reference length != schedule horizon");
  }
  if (ld.dt != schedule.dt) {
    throw std::invalid_argument("build_problem: dynamics discretized at a different dt");
  }
  if (!x0.finite()) throw std::invalid_argument("build_problem: non-finite state");
  const MpcLayout layout = MpcLayout::make(schedule);
  const int n = layout.num_vars;
  const int me = kStateDim * horizon;

  QpProblem p;
  p.gradient = VecX::Zero(n);
  p.eq_rhs = VecX::Zero(me);
  p.ineq_rhs = VecX::Zero(layout.num_ineq);

  std::vector<Eigen::Triplet<double>> h_trips, eq_trips, in_trips;
  h_trips.reserve(size_t(n));

  // Cost: sum_k (x_{k+1} - x_ref)' Q (x_{k+1} - x_ref) + u_k' R u_k, doubled
  // into the 1/2 z'Hz convention.
  for (int k = 0; k < horizon; ++k) {
    const int xo = layout.state_offset[size_t(k)];
    for (int i = 0; i < kStateDim; ++i) {
      h_trips.emplace_back(xo + i, xo + i, 2.0 * weights.state_weight(i));
      p.gradient(xo + i) = -2.0 * weights.state_weight(i) * ref.states[size_t(k)](i);
    }
    for (int foot = 0; foot < kNumFeet; ++foot) {
      const int uo = layout.foot_offset[size_t(k)][size_t(foot)];
      if (uo < 0) continue;
      for (int a = 0; a < 3; ++a) {
        h_trips.emplace_back(uo + a, uo + a, 2.0 * weights.force_weight(a));
        h_trips.emplace_back(uo + 3 + a, uo + 3 + a, 2.0 * weights.moment_weight(a));
      }
    }
  }

  // Dynamics equalities: x_{k+1} - A_d x_k - B_d u_k = (k == 0 ? A_d x0 : 0).
  // The full 13x13 block of A_d is inserted so the sparsity pattern does not
  // depend on the linearization point.
  for (int k = 0; k < horizon; ++k) {
    const int row = kStateDim * k;
    const int xo = layout.state_offset[size_t(k)];
    for (int i = 0; i < kStateDim; ++i) eq_trips.emplace_back(row + i, xo + i, 1.0);
    if (k == 0) {
      p.eq_rhs.segment<kStateDim>(row) = ld.a_discrete * x0.as_vector();
    } else {
      const int xprev = layout.state_offset[size_t(k - 1)];
      for (int i = 0; i < kStateDim; ++i) {
        for (int j = 0; j < kStateDim; ++j) {
          eq_trips.emplace_back(row + i, xprev + j, -ld.a_discrete(i, j));
        }
      }
    }
    for (int foot = 0; foot < kNumFeet; ++foot) {
      const int uo = layout.foot_offset[size_t(k)][size_t(foot)];
      if (uo < 0) continue;
      // Acceleration rows 6..11 of B_d; kinematic rows and the constant row
      // are structurally zero.
      for (int i = 6; i < 12; ++i) {
        for (int a = 0; a < 3; ++a) {
          eq_trips.emplace_back(row + i, uo + a, -ld.b_discrete(i, 3 * foot + a));
          eq_trips.emplace_back(row + i, uo + 3 + a, -ld.b_discrete(i, 6 + 3 * foot + a));
        }
      }
    }
  }

  // Inequalities per contact: |Fx|,|Fy| <= mu Fz, 0 <= Fz <= Fmax, and
  // -l_t (Sz Rf'F) <= Sy Rf'M <= l_h (Sz Rf'F).
  int row = 0;
  for (int k = 0; k < horizon; ++k) {
    for (int foot = 0; foot < kNumFeet; ++foot) {
      const int uo = layout.foot_offset[size_t(k)][size_t(foot)];
      if (uo < 0) continue;
      const double mu = params.friction;
      for (const int axis : {0, 1}) {
        in_trips.emplace_back(row, uo + axis, 1.0);
        in_trips.emplace_back(row, uo + 2, -mu);
        p.ineq_rhs(row++) = 0.0;
        in_trips.emplace_back(row, uo + axis, -1.0);
        in_trips.emplace_back(row, uo + 2, -mu);
        p.ineq_rhs(row++) = 0.0;
      }
      in_trips.emplace_back(row, uo + 2, -1.0);
      p.ineq_rhs(row++) = 0.0;
      in_trips.emplace_back(row, uo + 2, 1.0);
      p.ineq_rhs(row++) = params.force_max;
      const Vec3 sel_y = foot_rotation[size_t(foot)].col(1);
      const Vec3 sel_z = foot_rotation[size_t(foot)].col(2);
      for (int a = 0; a < 3; ++a) {
        in_trips.emplace_back(row, uo + 3 + a, sel_y(a));
        in_trips.emplace_back(row, uo + a, -params.heel_length * sel_z(a));
      }
      p.ineq_rhs(row++) = 0.0;
      for (int a = 0; a < 3; ++a) {
        in_trips.emplace_back(row, uo + 3 + a, -sel_y(a));
        in_trips.emplace_back(row, uo + a, -params.toe_length * sel_z(a));
      }
      p.ineq_rhs(row++) = 0.0;
    }
  }

  p.hessian.resize(n, n);
  p.hessian.setFromTriplets(h_trips.begin(), h_trips.end());
  p.hessian.makeCompressed();
  p.eq_matrix.resize(me, n);
  p.eq_matrix.setFromTriplets(eq_trips.begin(), eq_trips.end());
  p.eq_matrix.makeCompressed();
  p.ineq_matrix.resize(layout.num_ineq, n);
  p.ineq_matrix.setFromTriplets(in_trips.begin(), in_trips.end());
  p.ineq_matrix.makeCompressed();
  return p;
}

struct MpcResult {
  ContactWrench wrench;
  std::vector<Vec13> predicted_states;
  QpSolution qp;
  bool degraded = false;  // solve was not optimal; wrench is the last good one
  bool failed = false;    // no usable wrench at all
};

/// Per-instance MPC front end: linearize -> discretize -> transcribe ->
/// solve -> extract the first-step wrench. Falls back to the last optimal
/// wrench when a solve degrades. Instances are independent; one instance is
/// single-threaded.
class MpcController {
 public:
  MpcController(const MpcConfig& config, const MpcWeights& weights, const SrbdParams& params,
                const SolverSettings& solver_settings = {})
      : config_(config), weights_(weights), params_(params), solver_(solver_settings) {
    config_.validate();
    params_.validate();
  }

  const MpcConfig& config() const { return config_; }
  const SrbdParams& params() const { return params_; }
  const MpcWeights& weights() const { return weights_; }

  /// Residual-augmented solve.
  MpcResult solve(const RobotState& x0, const ReferenceTrajectory& ref,
                  const ContactSchedule& schedule, const FootPositions& com_to_foot,
                  const std::array<Mat3, kNumFeet>& foot_rotation,
                  const ResidualDynamics& res) {
    const LinearizedDynamics ld =
        discretize(linearize(x0, com_to_foot, params_, res), schedule.dt);
    return run(x0, ref, schedule, ld, foot_rotation);
  }

  /// Nominal solve with no residual plumbing on the code path.
  MpcResult solve_nominal(const RobotState& x0, const ReferenceTrajectory& ref,
                          const ContactSchedule& schedule, const FootPositions& com_to_foot,
                          const std::array<Mat3, kNumFeet>& foot_rotation) {
    const LinearizedDynamics ld =
        discretize(linearize_nominal(x0, com_to_foot, params_), schedule.dt);
    return run(x0, ref, schedule, ld, foot_rotation);
  }

 private:
  MpcResult run(const RobotState& x0, const ReferenceTrajectory& ref,
                const ContactSchedule& schedule, const LinearizedDynamics& ld,
                const std::array<Mat3, kNumFeet>& foot_rotation) {
    const QpProblem problem =
        build_problem(x0, ref, schedule, ld, foot_rotation, params_, weights_);
    const MpcLayout layout = MpcLayout::make(schedule);

    MpcResult result;
    result.qp = solver_.solve(problem);
    if (result.qp.status == SolveStatus::kOptimal) {
      for (int foot = 0; foot < kNumFeet; ++foot) {
        const int uo = layout.foot_offset[0][size_t(foot)];
        if (uo < 0) continue;
        result.wrench.force[size_t(foot)] = result.qp.primal.segment<3>(uo);
        result.wrench.moment[size_t(foot)] = result.qp.primal.segment<3>(uo + 3);
      }
      result.predicted_states.resize(size_t(layout.horizon));
      for (int k = 0; k < layout.horizon; ++k) {
        result.predicted_states[size_t(k)] =
            result.qp.primal.segment<kStateDim>(layout.state_offset[size_t(k)]);
      }
      last_wrench_ = result.wrench;
      has_last_ = true;
      return result;
    }
    result.degraded = true;
    if (has_last_) {
      result.wrench = last_wrench_;
      // Contact gating still applies to the fallback.
      for (int foot = 0; foot < kNumFeet; ++foot) {
        if (!schedule.stance[0][size_t(foot)]) {
          result.wrench.force[size_t(foot)].setZero();
          result.wrench.moment[size_t(foot)].setZero();
        }
      }
    } else {
      result.failed = true;
    }
    return result;
  }

  MpcConfig config_;
  MpcWeights weights_;
  SrbdParams params_;
  IpmSolver solver_;
  ContactWrench last_wrench_;
  bool has_last_ = false;
};

}  // namespace srbmpc
