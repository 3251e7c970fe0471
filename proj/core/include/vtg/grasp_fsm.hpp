#pragma once

// Reactive grasp sequencer.  A tick-driven state machine moves the hand
// through perceive / approach / search / close / lift / transport / place,
// restarting the attempt when a stage fails.  Each tick consumes a snapshot
// of the latest perception, tactile and arm state and emits exactly one
// motion command.
//
// Hand conventions: the hand frame origin sits at the fingertip plane, so
// the hand pose z is the fingertip height; apertures are the radial opening
// of each finger from the hand axis in meters.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vtg/geometry.hpp"
#include "vtg/recognition.hpp"

namespace vtg {

enum class GraspStateId {
  kIdle,
  kPerceive,
  kApproach,
  kSearch,
  kClose,
  kLift,
  kTransport,
  kPlace,
  kDone,
  kRestart,
};

const char* to_string(GraspStateId id);

// Move the hand in a straight line to `target` at up to `max_speed`,
// rotating toward the target orientation at a bounded angular rate.
struct CartesianGoal {
  RigidTransform target;
  double max_speed = 0.25;
};

// Translate the hand at `linear` (m/s, base frame) for one tick.
struct VelocityCommand {
  Vec3 linear;
  double duration = 0.01;
};

// Change each active finger's aperture at `rate` (m/s); negative closes.
struct FingerCommand {
  double rate = 0.0;
  std::array<bool, 3> active{true, true, true};
};

struct StopCommand {};

using Command = std::variant<StopCommand, CartesianGoal, VelocityCommand, FingerCommand>;

// Per-scenario grasp strategy.
struct GraspPolicy {
  std::string target_label;  // empty accepts any recognized label
  double min_confidence = 0.5;

  // Approach goal relative to the estimated object pose.  With
  // align_with_object the offset and rotation compose with the object
  // orientation; otherwise they are applied in the base frame.
  Vec3 approach_offset{0.0, 0.0, 0.10};
  Quat approach_rotation;
  bool align_with_object = true;
  // Open fingertips must clear the feature cross-section by the standoff:
  // open_aperture >= feature_radius + standoff.
  double standoff = 0.005;
  double feature_radius = 0.01;

  // Lawnmower sweep around the approach point: rows along x, spaced by
  // `search_pitch` in y, covering search_region_x by search_region_y.
  // A zero-size region degenerates to the start point alone.
  double search_region_x = 0.08;
  double search_region_y = 0.08;
  double search_pitch = 0.01;
  double search_speed = 0.10;

  int required_contacts = 2;
  int max_attempts = 3;

  double close_rate = 0.02;
  double open_rate = 0.05;
  double open_aperture = 0.05;

  double lift_height = 0.10;
  Vec3 place_target{0.0, 0.0, 0.10};

  // Support-surface prior: descent stops while any proximity detection
  // happens with the fingertips below table_height + guard_margin.
  double table_height = 0.0;
  double guard_margin = 0.015;
};

// Global motion limits and timing, independent of the scenario.
struct FsmLimits {
  double max_linear_speed = 0.25;
  double max_angular_speed = 1.5;  // rad/s
  double max_finger_rate = 0.10;
  double goal_tol_m = 0.005;
  double goal_tol_deg = 1.0;
  double state_timeout_s = 10.0;
  double tick_period_s = 0.01;

  // Workspace box for approach goals, base frame.
  Vec3 workspace_min{-0.60, -0.60, 0.0};
  Vec3 workspace_max{0.60, 0.60, 0.60};
};

// Snapshot consumed by one tick.  `estimate` holds the most recent
// recognition result, if any arrived since the last tick.
struct FsmInputs {
  double t = 0.0;
  std::optional<PoseEstimate> estimate;
  std::array<bool, 3> touch{false, false, false};
  std::array<bool, 3> detected{false, false, false};
  RigidTransform hand_pose;  // pose of the hand in the base frame
  std::array<double, 3> apertures{0.0, 0.0, 0.0};
};

struct Transition {
  double t = 0.0;
  GraspStateId from = GraspStateId::kIdle;
  GraspStateId to = GraspStateId::kIdle;
  std::string reason;
};

// One line per transition: "t from to reason".
std::string format_trace(const std::vector<Transition>& trace);

// Computes the approach goal for a recognized object: the object pose
// composed with the policy offset and rotation.  Throws PlanningError when
// the estimate confidence is below policy.min_confidence, when the open
// fingers cannot clear the feature by the standoff, or when the goal leaves
// the workspace box.
CartesianGoal plan_approach(const PoseEstimate& pose, const GraspPolicy& policy,
                            const FsmLimits& limits);

enum class SearchStatus { kRunning, kFound, kNotFound };

struct SearchState {
  std::vector<Vec3> waypoints;
  std::size_t next = 0;
  SearchStatus status = SearchStatus::kRunning;
};

// Plans the sweep around `center` at the current height.
SearchState make_search_plan(const Vec3& center, const GraspPolicy& policy);

// Advances the sweep one tick.  Any detected flag wins immediately
// (status Found, Stop); an exhausted plan reports NotFound; otherwise the
// command moves toward the next waypoint at the sweep speed.
Command search_step(SearchState& state, const std::array<bool, 3>& detected,
                    const Vec3& hand_position, const GraspPolicy& policy,
                    const FsmLimits& limits);

struct CloseState {
  std::array<bool, 3> frozen{false, false, false};
  bool complete = false;
  bool timed_out = false;
};

// Closes all fingers at the policy rate, freezing each one permanently once
// its touch flag fires.  Complete when policy.required_contacts fingers have
// touched; timed out when `elapsed` exceeds the state timeout.
Command close_fingers_step(CloseState& state, const std::array<bool, 3>& touch,
                           double elapsed, const GraspPolicy& policy,
                           const FsmLimits& limits);

class GraspFsm {
 public:
  GraspFsm(GraspPolicy policy, FsmLimits limits);

  // Pure transition step: same state and input always yield the same
  // command, next state and trace entry.
  Command tick(const FsmInputs& in);

  GraspStateId state() const { return state_; }
  int attempt() const { return attempt_; }
  bool finished() const { return state_ == GraspStateId::kDone; }
  // True once the full place sequence ran to completion.
  bool sequence_complete() const { return sequence_complete_; }
  const std::vector<Transition>& trace() const { return trace_; }
  const GraspPolicy& policy() const { return policy_; }
  const FsmLimits& limits() const { return limits_; }

 private:
  void change(double t, GraspStateId to, const std::string& reason);
  bool timed_out(double t, double budget) const;
  bool guard_active(const FsmInputs& in) const;
  bool goal_reached(const FsmInputs& in, const RigidTransform& target,
                    bool allow_guard_stop) const;
  Command emit_goal(const FsmInputs& in, bool guarded);
  bool fingers_open(const FsmInputs& in) const;

  Command handle_idle(const FsmInputs& in);
  Command handle_perceive(const FsmInputs& in);
  Command handle_approach(const FsmInputs& in);
  Command handle_search(const FsmInputs& in);
  Command handle_close(const FsmInputs& in);
  Command handle_lift(const FsmInputs& in);
  Command handle_transport(const FsmInputs& in);
  Command handle_place(const FsmInputs& in);
  Command handle_restart(const FsmInputs& in);

  GraspPolicy policy_;
  FsmLimits limits_;
  GraspStateId state_ = GraspStateId::kIdle;
  int attempt_ = 0;
  double entry_t_ = 0.0;
  bool sequence_complete_ = false;
  std::vector<Transition> trace_;

  CartesianGoal goal_;      // active Cartesian target (approach/lift/...)
  SearchState search_;
  CloseState close_;
  double search_budget_ = 0.0;
  bool place_reached_ = false;
};

}  // namespace vtg
