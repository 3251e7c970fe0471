#include "vtg/grasp_fsm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vtg/error.hpp"

namespace vtg {
namespace {

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

bool any(const std::array<bool, 3>& f) { return f[0] || f[1] || f[2]; }

double planar_distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

const char* to_string(GraspStateId id) {
  switch (id) {
    case GraspStateId::kIdle: return "Idle";
    case GraspStateId::kPerceive: return "Perceive";
    case GraspStateId::kApproach: return "Approach";
    case GraspStateId::kSearch: return "Search";
    case GraspStateId::kClose: return "Close";
    case GraspStateId::kLift: return "Lift";
    case GraspStateId::kTransport: return "Transport";
    case GraspStateId::kPlace: return "Place";
    case GraspStateId::kDone: return "Done";
    case GraspStateId::kRestart: return "Restart";
  }
  return "?";
}

std::string format_trace(const std::vector<Transition>& trace) {
  std::string out;
  char buf[64];
  for (const Transition& tr : trace) {
    std::snprintf(buf, sizeof(buf), "%.3f", tr.t);
    out += buf;
    out += ' ';
    out += to_string(tr.from);
    out += ' ';
    out += to_string(tr.to);
    out += ' ';
    out += tr.reason;
    out += '\n';
  }
  return out;
}

CartesianGoal plan_approach(const PoseEstimate& pose, const GraspPolicy& policy,
                            const FsmLimits& limits) {
  if (!(pose.confidence >= policy.min_confidence)) {
    throw PlanningError("pose confidence below planning minimum");
  }
  if (!policy.approach_offset.is_finite()) {
    throw PlanningError("approach offset is not finite");
  }
  if (policy.open_aperture < policy.feature_radius + policy.standoff) {
    throw PlanningError("open fingers cannot clear the feature by the standoff");
  }

  CartesianGoal goal;
  if (policy.align_with_object) {
    goal.target.translation =
        pose.pose.translation + pose.pose.rotation.rotate(policy.approach_offset);
    goal.target.rotation =
        (pose.pose.rotation * policy.approach_rotation).normalized();
  } else {
    goal.target.translation = pose.pose.translation + policy.approach_offset;
    goal.target.rotation = policy.approach_rotation.normalized();
  }
  goal.target.from_frame = "hand";
  goal.target.to_frame = pose.pose.to_frame;
  goal.max_speed = limits.max_linear_speed;

  const Vec3& p = goal.target.translation;
  const Vec3& lo = limits.workspace_min;
  const Vec3& hi = limits.workspace_max;
  if (!p.is_finite() || p.x < lo.x || p.x > hi.x || p.y < lo.y || p.y > hi.y ||
      p.z < lo.z || p.z > hi.z) {
    throw PlanningError("approach goal outside the workspace box");
  }
  return goal;
}

SearchState make_search_plan(const Vec3& center, const GraspPolicy& policy) {
  SearchState s;
  const double rx = std::max(0.0, policy.search_region_x);
  const double ry = std::max(0.0, policy.search_region_y);
  if (rx <= 0.0 && ry <= 0.0) {
    s.waypoints.push_back(center);
    return s;
  }
  int rows = 1;
  if (policy.search_pitch > 0.0 && ry > 0.0) {
    rows = static_cast<int>(std::floor(ry / policy.search_pitch + 1e-9)) + 1;
  }
  for (int i = 0; i < rows; ++i) {
    const double y = center.y - ry / 2.0 + i * policy.search_pitch;
    double x0 = center.x - rx / 2.0;
    double x1 = center.x + rx / 2.0;
    if (i % 2 == 1) std::swap(x0, x1);
    s.waypoints.push_back({x0, y, center.z});
    s.waypoints.push_back({x1, y, center.z});
  }
  return s;
}

Command search_step(SearchState& state, const std::array<bool, 3>& detected,
                    const Vec3& hand_position, const GraspPolicy& policy,
                    const FsmLimits& limits) {
  if (state.status != SearchStatus::kRunning) return StopCommand{};
  if (any(detected)) {
    state.status = SearchStatus::kFound;
    return StopCommand{};
  }
  // Waypoints count as reached within a tolerance tied to the row pitch so
  // rows stay faithful to the sweep, floored at just over half a tick's
  // travel so the per-tick steps always converge.
  const double speed = clamp(policy.search_speed, 0.0, limits.max_linear_speed);
  const double step = speed * limits.tick_period_s;
  const double wp_tol =
      std::max(0.6 * step,
               std::min(limits.goal_tol_m, 0.25 * std::max(policy.search_pitch, 0.0)));
  while (state.next < state.waypoints.size() &&
         distance(hand_position, state.waypoints[state.next]) <= wp_tol) {
    ++state.next;
  }
  if (state.next == state.waypoints.size()) {
    state.status = SearchStatus::kNotFound;
    return StopCommand{};
  }
  const Vec3 to_wp = state.waypoints[state.next] - hand_position;
  const double dist = to_wp.norm();
  VelocityCommand cmd;
  cmd.linear = to_wp * (speed / dist);
  cmd.duration = limits.tick_period_s;
  return cmd;
}

Command close_fingers_step(CloseState& state, const std::array<bool, 3>& touch,
                           double elapsed, const GraspPolicy& policy,
                           const FsmLimits& limits) {
  int touching = 0;
  for (int i = 0; i < 3; ++i) {
    if (touch[i]) state.frozen[i] = true;
    if (state.frozen[i]) ++touching;
  }
  if (touching >= policy.required_contacts) {
    state.complete = true;
    return StopCommand{};
  }
  if (elapsed > limits.state_timeout_s) {
    state.timed_out = true;
    return StopCommand{};
  }
  FingerCommand cmd;
  cmd.rate = -clamp(policy.close_rate, 0.0, limits.max_finger_rate);
  cmd.active = {!state.frozen[0], !state.frozen[1], !state.frozen[2]};
  return cmd;
}

GraspFsm::GraspFsm(GraspPolicy policy, FsmLimits limits)
    : policy_(std::move(policy)), limits_(limits) {
  if (policy_.required_contacts < 1 || policy_.required_contacts > 3) {
    throw ConfigError("required_contacts must be 1, 2 or 3");
  }
  if (policy_.max_attempts < 1) {
    throw ConfigError("max_attempts must be at least 1");
  }
  if (!policy_.approach_offset.is_finite() || !policy_.place_target.is_finite()) {
    throw ConfigError("policy offsets must be finite");
  }
  if (policy_.close_rate < 0.0 || policy_.open_rate < 0.0 ||
      policy_.search_speed < 0.0) {
    throw ConfigError("policy rates must be non-negative");
  }
}

void GraspFsm::change(double t, GraspStateId to, const std::string& reason) {
  trace_.push_back({t, state_, to, reason});
  state_ = to;
  entry_t_ = t;
}

bool GraspFsm::timed_out(double t, double budget) const {
  return t - entry_t_ > budget;
}

bool GraspFsm::guard_active(const FsmInputs& in) const {
  return any(in.detected) &&
         in.hand_pose.translation.z < policy_.table_height + policy_.guard_margin;
}

bool GraspFsm::goal_reached(const FsmInputs& in, const RigidTransform& target,
                            bool allow_guard_stop) const {
  const Vec3 d = target.translation - in.hand_pose.translation;
  if (planar_distance(target.translation, in.hand_pose.translation) >
      limits_.goal_tol_m) {
    return false;
  }
  const bool vertical_ok =
      std::abs(d.z) <= limits_.goal_tol_m ||
      (allow_guard_stop && guard_active(in) && d.z < 0.0);
  if (!vertical_ok) return false;
  return in.hand_pose.rotation.angle_to(target.rotation) * kRadToDeg <=
         limits_.goal_tol_deg;
}

Command GraspFsm::emit_goal(const FsmInputs& in, bool guarded) {
  CartesianGoal g = goal_;
  if (guarded && guard_active(in)) {
    g.target.translation.z =
        std::max(g.target.translation.z, in.hand_pose.translation.z);
  }
  g.max_speed = clamp(g.max_speed, 0.0, limits_.max_linear_speed);
  return g;
}

bool GraspFsm::fingers_open(const FsmInputs& in) const {
  const double want = policy_.open_aperture - 1e-9;
  return in.apertures[0] >= want && in.apertures[1] >= want &&
         in.apertures[2] >= want;
}

Command GraspFsm::tick(const FsmInputs& in) {
  switch (state_) {
    case GraspStateId::kIdle: return handle_idle(in);
    case GraspStateId::kPerceive: return handle_perceive(in);
    case GraspStateId::kApproach: return handle_approach(in);
    case GraspStateId::kSearch: return handle_search(in);
    case GraspStateId::kClose: return handle_close(in);
    case GraspStateId::kLift: return handle_lift(in);
    case GraspStateId::kTransport: return handle_transport(in);
    case GraspStateId::kPlace: return handle_place(in);
    case GraspStateId::kRestart: return handle_restart(in);
    case GraspStateId::kDone: break;
  }
  return StopCommand{};
}

Command GraspFsm::handle_idle(const FsmInputs& in) {
  attempt_ = 1;
  change(in.t, GraspStateId::kPerceive, "start");
  return StopCommand{};
}

Command GraspFsm::handle_perceive(const FsmInputs& in) {
  const bool usable =
      in.estimate.has_value() &&
      (policy_.target_label.empty() || in.estimate->label == policy_.target_label) &&
      in.estimate->confidence >= policy_.min_confidence;
  if (usable) {
    try {
      goal_ = plan_approach(*in.estimate, policy_, limits_);
    } catch (const PlanningError&) {
      change(in.t, GraspStateId::kRestart, "goal_unreachable");
      return StopCommand{};
    }
    change(in.t, GraspStateId::kApproach, "object_recognized");
    return emit_goal(in, true);
  }
  if (timed_out(in.t, limits_.state_timeout_s)) {
    change(in.t, GraspStateId::kDone, "perception_timeout");
  }
  return StopCommand{};
}

Command GraspFsm::handle_approach(const FsmInputs& in) {
  if (goal_reached(in, goal_.target, true)) {
    // Sweep around the estimated feature position at the achieved height.
    Vec3 center = goal_.target.translation;
    center.z = in.hand_pose.translation.z;
    search_ = make_search_plan(center, policy_);
    double length = 0.0;
    Vec3 prev = in.hand_pose.translation;
    for (const Vec3& wp : search_.waypoints) {
      length += distance(prev, wp);
      prev = wp;
    }
    const double speed = clamp(policy_.search_speed, 0.0, limits_.max_linear_speed);
    search_budget_ = speed > 0.0
                         ? std::max(limits_.state_timeout_s, 1.5 * length / speed)
                         : limits_.state_timeout_s;
    change(in.t, GraspStateId::kSearch, "approach_complete");
    return StopCommand{};
  }
  if (timed_out(in.t, limits_.state_timeout_s)) {
    change(in.t, GraspStateId::kRestart, "approach_timeout");
    return StopCommand{};
  }
  return emit_goal(in, true);
}

Command GraspFsm::handle_search(const FsmInputs& in) {
  Command cmd =
      search_step(search_, in.detected, in.hand_pose.translation, policy_, limits_);
  if (search_.status == SearchStatus::kFound) {
    close_ = CloseState{};
    change(in.t, GraspStateId::kClose, "feature_detected");
    return StopCommand{};
  }
  if (search_.status == SearchStatus::kNotFound) {
    change(in.t, GraspStateId::kRestart, "search_exhausted");
    return StopCommand{};
  }
  if (timed_out(in.t, search_budget_)) {
    change(in.t, GraspStateId::kRestart, "search_timeout");
    return StopCommand{};
  }
  if (guard_active(in)) {
    if (auto* v = std::get_if<VelocityCommand>(&cmd)) {
      if (v->linear.z < 0.0) v->linear.z = 0.0;
    }
  }
  return cmd;
}

Command GraspFsm::handle_close(const FsmInputs& in) {
  Command cmd =
      close_fingers_step(close_, in.touch, in.t - entry_t_, policy_, limits_);
  if (close_.complete) {
    goal_.target = in.hand_pose;
    goal_.target.translation.z += policy_.lift_height;
    goal_.max_speed = limits_.max_linear_speed;
    change(in.t, GraspStateId::kLift, "grasp_secured");
    return StopCommand{};
  }
  if (close_.timed_out) {
    change(in.t, GraspStateId::kRestart, "close_timeout");
    return StopCommand{};
  }
  return cmd;
}

Command GraspFsm::handle_lift(const FsmInputs& in) {
  if (goal_reached(in, goal_.target, false)) {
    goal_.target = in.hand_pose;
    goal_.target.translation.x = policy_.place_target.x;
    goal_.target.translation.y = policy_.place_target.y;
    change(in.t, GraspStateId::kTransport, "lift_complete");
    return StopCommand{};
  }
  if (timed_out(in.t, limits_.state_timeout_s)) {
    change(in.t, GraspStateId::kDone, "lift_timeout");
    return StopCommand{};
  }
  return emit_goal(in, false);
}

Command GraspFsm::handle_transport(const FsmInputs& in) {
  if (goal_reached(in, goal_.target, false)) {
    goal_.target = in.hand_pose;
    goal_.target.translation = policy_.place_target;
    place_reached_ = false;
    change(in.t, GraspStateId::kPlace, "transport_complete");
    return StopCommand{};
  }
  if (timed_out(in.t, limits_.state_timeout_s)) {
    change(in.t, GraspStateId::kDone, "transport_timeout");
    return StopCommand{};
  }
  return emit_goal(in, false);
}

Command GraspFsm::handle_place(const FsmInputs& in) {
  if (!place_reached_) {
    if (goal_reached(in, goal_.target, false)) {
      place_reached_ = true;
    } else if (timed_out(in.t, limits_.state_timeout_s)) {
      change(in.t, GraspStateId::kDone, "place_timeout");
      return StopCommand{};
    } else {
      return emit_goal(in, false);
    }
  }
  if (fingers_open(in)) {
    sequence_complete_ = true;
    change(in.t, GraspStateId::kDone, "place_complete");
    return StopCommand{};
  }
  if (timed_out(in.t, limits_.state_timeout_s)) {
    change(in.t, GraspStateId::kDone, "place_timeout");
    return StopCommand{};
  }
  FingerCommand open;
  open.rate = clamp(policy_.open_rate, 0.0, limits_.max_finger_rate);
  return open;
}

Command GraspFsm::handle_restart(const FsmInputs& in) {
  if (fingers_open(in)) {
    if (attempt_ < policy_.max_attempts) {
      ++attempt_;
      change(in.t, GraspStateId::kPerceive, "retry");
    } else {
      change(in.t, GraspStateId::kDone, "attempts_exhausted");
    }
    return StopCommand{};
  }
  if (timed_out(in.t, limits_.state_timeout_s)) {
    change(in.t, GraspStateId::kDone, "restart_timeout");
    return StopCommand{};
  }
  FingerCommand open;
  open.rate = clamp(policy_.open_rate, 0.0, limits_.max_finger_rate);
  return open;
}

}  // namespace vtg
