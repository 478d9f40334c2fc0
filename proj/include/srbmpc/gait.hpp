#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace srbmpc {

/// dt_mpc = dt_nominal * (1 + s). Rejects s <= -1.
inline double apply_sampling_coefficient(double dt_nominal, double s_coef) {
  if (!(dt_nominal > 0.0)) {
    throw std::invalid_argument("apply_sampling_coefficient: dt_nominal must be > 0");
  }
  if (!(1.0 + s_coef > 0.0)) {
    throw std::invalid_argument("apply_sampling_coefficient: s must be > -1");
  }
  return dt_nominal * (1.0 + s_coef);
}

struct ContactSchedule {
  double dt = 0.025;
  std::vector<std::array<bool, 2>> stance;

  int horizon() const { return int(stance.size()); }
  int num_contacts(int step) const { return int(stance[size_t(step)][0]) + int(stance[size_t(step)][1]); }
};

struct GaitEvent {
  enum class Type { kLiftoff, kTouchdown };
  Type type;
  int foot;
};

/// Periodic walking clock. One cycle is
///   DS (2 dt_mpc) -> left swing (8 dt_mpc) -> DS -> right swing,
/// so each foot is in stance 60% of the cycle regardless of the sampling
/// coefficient. The swing phase variable spans a single-support segment.
/// A new sampling coefficient is latched at touchdown events, which keeps an
/// in-flight swing at the duration it started with.
class GaitScheduler {
 public:
  static constexpr int kDoubleSupportSteps = 2;
  static constexpr int kSingleSupportSteps = 8;

  explicit GaitScheduler(double dt_nominal = 0.025, double s_initial = 0.0)
      : dt_nominal_(dt_nominal) {
    dt_mpc_ = apply_sampling_coefficient(dt_nominal, s_initial);
    s_coef_ = s_initial;
    pending_s_ = s_initial;
  }

  double dt_nominal() const { return dt_nominal_; }
  double dt_mpc() const { return dt_mpc_; }
  double sampling_coefficient() const { return s_coef_; }
  double double_support_duration() const { return kDoubleSupportSteps * dt_mpc_; }
  double single_support_duration() const { return kSingleSupportSteps * dt_mpc_; }
  double swing_duration() const { return single_support_duration(); }
  double cycle_duration() const {
    return 2.0 * (double_support_duration() + single_support_duration());
  }

  /// Takes effect at the next touchdown.
  void set_sampling_coefficient(double s) {
    apply_sampling_coefficient(dt_nominal_, s);  // validates
    pending_s_ = s;
  }

  /// Segment index: 0 = DS before left swing, 1 = left swing,
  /// 2 = DS before right swing, 3 = right swing.
  int segment() const { return segment_; }
  double time_in_segment() const { return t_seg_; }

  double phase() const {
    double acc = 0.0;
    for (int s = 0; s < segment_; ++s) acc += segment_duration(s);
    const double p = (acc + t_seg_) / cycle_duration();
    return std::clamp(p, 0.0, std::nextafter(1.0, 0.0));
  }

  std::array<double, 2> swing_phase() const {
    std::array<double, 2> phi = {0.0, 0.0};
    if (segment_ == 1) phi[0] = std::clamp(t_seg_ / single_support_duration(), 0.0, 1.0);
    if (segment_ == 3) phi[1] = std::clamp(t_seg_ / single_support_duration(), 0.0, 1.0);
    return phi;
  }

  std::array<bool, 2> stance_now() const { return stance_of(segment_); }

  /// -1 when both feet are on the ground.
  int swing_foot() const { return segment_ == 1 ? 0 : segment_ == 3 ? 1 : -1; }

  /// Time until this foot's next liftoff under the current timing; 0 while
  /// it swings.
  double remaining_stance_time(int foot) const {
    const int liftoff_segment = foot == 0 ? 1 : 3;
    if (segment_ == liftoff_segment) return 0.0;
    double t = segment_duration(segment_) - t_seg_;
    for (int s = (segment_ + 1) % 4; s != liftoff_segment; s = (s + 1) % 4) {
      t += segment_duration(s);
    }
    return t;
  }

  double remaining_swing_time(int foot) const {
    if (swing_foot() != foot) return 0.0;
    return segment_duration(segment_) - t_seg_;
  }

  std::vector<GaitEvent> advance(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("GaitScheduler::advance: dt must be > 0");
    std::vector<GaitEvent> events;
    double remaining = dt;
    while (remaining > 0.0) {
      const double left = segment_duration(segment_) - t_seg_;
      if (remaining < left - 1e-12) {
        t_seg_ += remaining;
        break;
      }
      remaining -= left;
      next_segment(events);
    }
    return events;
  }

  /// Stance flags at now + k * dt_mpc for k = 0..horizon-1, with segment
  /// durations held constant over the horizon.
  ContactSchedule contact_schedule(int horizon) const {
    if (horizon < 1) throw std::invalid_argument("contact_schedule: horizon must be >= 1");
    ContactSchedule cs;
    cs.dt = dt_mpc_;
    cs.stance.resize(size_t(horizon));
    int seg = segment_;
    double t = t_seg_;
    for (int k = 0; k < horizon; ++k) {
      cs.stance[size_t(k)] = stance_of(seg);
      double step = dt_mpc_;
      while (step > 0.0) {
        const double left = segment_duration(seg) - t;
        if (step < left - 1e-12) {
          t += step;
          break;
        }
        step -= left;
        t = 0.0;
        seg = (seg + 1) % 4;
      }
    }
    return cs;
  }

 private:
  double segment_duration(int seg) const {
    return (seg == 0 || seg == 2) ? double_support_duration() : single_support_duration();
  }

  static std::array<bool, 2> stance_of(int seg) {
    switch (seg) {
      case 1: return {false, true};
      case 3: return {true, false};
      default: return {true, true};
    }
  }

  void next_segment(std::vector<GaitEvent>& events) {
    t_seg_ = 0.0;
    switch (segment_) {
      case 0:
        segment_ = 1;
        events.push_back({GaitEvent::Type::kLiftoff, 0});
        break;
      case 1:
        segment_ = 2;
        events.push_back({GaitEvent::Type::kTouchdown, 0});
        latch_sampling();
        break;
      case 2:
        segment_ = 3;
        events.push_back({GaitEvent::Type::kLiftoff, 1});
        break;
      default:
        segment_ = 0;
        events.push_back({GaitEvent::Type::kTouchdown, 1});
        latch_sampling();
        break;
    }
  }

  void latch_sampling() {
    s_coef_ = pending_s_;
    dt_mpc_ = apply_sampling_coefficient(dt_nominal_, s_coef_);
  }

  double dt_nominal_;
  double dt_mpc_;
  double s_coef_ = 0.0;
  double pending_s_ = 0.0;
  int segment_ = 0;
  double t_seg_ = 0.0;
};

}  // namespace srbmpc
