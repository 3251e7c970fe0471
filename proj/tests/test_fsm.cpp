#include "vtg/grasp_fsm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "doctest.h"
#include "vtg/error.hpp"
#include "vtg/rng.hpp"

using namespace vtg;

namespace {

constexpr double kDt = 0.01;

// Minimal command executor: straight-line translation at the commanded
// speed, instant rotation, per-finger aperture integration.
struct TestArm {
  RigidTransform pose = RigidTransform::identity("base");
  std::array<double, 3> apertures{0.05, 0.05, 0.05};
  double max_aperture = 0.05;

  void apply(const Command& cmd, double dt) {
    if (const auto* goal = std::get_if<CartesianGoal>(&cmd)) {
      const Vec3 delta = goal->target.translation - pose.translation;
      const double dist = delta.norm();
      const double step = std::min(goal->max_speed * dt, dist);
      if (dist > 0.0) pose.translation += delta * (step / dist);
      pose.rotation = goal->target.rotation;
    } else if (const auto* vel = std::get_if<VelocityCommand>(&cmd)) {
      pose.translation += vel->linear * dt;
    } else if (const auto* fin = std::get_if<FingerCommand>(&cmd)) {
      for (int i = 0; i < 3; ++i) {
        if (!fin->active[i]) continue;
        apertures[i] =
            std::clamp(apertures[i] + fin->rate * dt, 0.0, max_aperture);
      }
    }
  }
};

std::string command_repr(const Command& cmd) {
  char buf[256];
  if (const auto* goal = std::get_if<CartesianGoal>(&cmd)) {
    std::snprintf(buf, sizeof(buf), "goal %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g",
                  goal->target.translation.x, goal->target.translation.y,
                  goal->target.translation.z, goal->target.rotation.w,
                  goal->target.rotation.x, goal->target.rotation.y,
                  goal->target.rotation.z, goal->max_speed);
  } else if (const auto* vel = std::get_if<VelocityCommand>(&cmd)) {
    std::snprintf(buf, sizeof(buf), "vel %.17g %.17g %.17g %.17g", vel->linear.x,
                  vel->linear.y, vel->linear.z, vel->duration);
  } else if (const auto* fin = std::get_if<FingerCommand>(&cmd)) {
    std::snprintf(buf, sizeof(buf), "fingers %.17g %d%d%d", fin->rate,
                  int(fin->active[0]), int(fin->active[1]), int(fin->active[2]));
  } else {
    std::snprintf(buf, sizeof(buf), "stop");
  }
  return buf;
}

void check_limits(const Command& cmd, const FsmLimits& limits) {
  if (const auto* goal = std::get_if<CartesianGoal>(&cmd)) {
    CHECK(goal->max_speed <= limits.max_linear_speed + 1e-12);
  } else if (const auto* vel = std::get_if<VelocityCommand>(&cmd)) {
    CHECK(vel->linear.norm() <= limits.max_linear_speed + 1e-12);
  } else if (const auto* fin = std::get_if<FingerCommand>(&cmd)) {
    CHECK(std::abs(fin->rate) <= limits.max_finger_rate + 1e-12);
  }
}

PoseEstimate make_estimate(const Vec3& position, const Quat& rotation,
                           double confidence, const std::string& label) {
  PoseEstimate e;
  e.label = label;
  e.pose = {rotation, position, label, "base"};
  e.confidence = confidence;
  e.orientation_valid = true;
  return e;
}

std::vector<GraspStateId> visited_states(const GraspFsm& fsm) {
  std::vector<GraspStateId> out{GraspStateId::kIdle};
  for (const Transition& tr : fsm.trace()) out.push_back(tr.to);
  return out;
}

std::vector<std::string> reasons(const GraspFsm& fsm) {
  std::vector<std::string> out;
  for (const Transition& tr : fsm.trace()) out.push_back(tr.reason);
  return out;
}

// Every entry into Close must come from Search after a detection.
void check_close_provenance(const GraspFsm& fsm) {
  for (const Transition& tr : fsm.trace()) {
    if (tr.to == GraspStateId::kClose) {
      CHECK(tr.from == GraspStateId::kSearch);
      CHECK(tr.reason == "feature_detected");
    }
  }
}

// Attempt counter bumps exactly on Restart -> Perceive retries.
void check_attempts(const GraspFsm& fsm, int max_attempts) {
  int expect = 1;
  for (const Transition& tr : fsm.trace()) {
    if (tr.from == GraspStateId::kRestart && tr.to == GraspStateId::kPerceive) {
      ++expect;
    }
  }
  CHECK(fsm.attempt() == expect);
  CHECK(fsm.attempt() <= max_attempts);
}

}  // namespace

TEST_CASE("state names cover the whole enum") {
  CHECK(std::string(to_string(GraspStateId::kIdle)) == "Idle");
  CHECK(std::string(to_string(GraspStateId::kPerceive)) == "Perceive");
  CHECK(std::string(to_string(GraspStateId::kApproach)) == "Approach");
  CHECK(std::string(to_string(GraspStateId::kSearch)) == "Search");
  CHECK(std::string(to_string(GraspStateId::kClose)) == "Close");
  CHECK(std::string(to_string(GraspStateId::kLift)) == "Lift");
  CHECK(std::string(to_string(GraspStateId::kTransport)) == "Transport");
  CHECK(std::string(to_string(GraspStateId::kPlace)) == "Place");
  CHECK(std::string(to_string(GraspStateId::kDone)) == "Done");
  CHECK(std::string(to_string(GraspStateId::kRestart)) == "Restart");
}

TEST_CASE("trace formatting is one line per transition") {
  std::vector<Transition> trace{
      {0.0, GraspStateId::kIdle, GraspStateId::kPerceive, "start"},
      {1.25, GraspStateId::kPerceive, GraspStateId::kApproach, "object_recognized"},
  };
  CHECK(format_trace(trace) ==
        "0.000 Idle Perceive start\n1.250 Perceive Approach object_recognized\n");
}

TEST_CASE("approach goal is the object pose shifted by the policy offset") {
  GraspPolicy policy;
  policy.approach_offset = {0.0, 0.0, 0.10};
  FsmLimits limits;

  auto est = make_estimate({0.0, 0.0, 0.0}, Quat::identity(), 0.9, "cup");
  CartesianGoal goal = plan_approach(est, policy, limits);
  CHECK(goal.target.translation.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(goal.target.translation.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(goal.target.translation.z == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(goal.target.rotation.angle_to(Quat::identity()) < 1e-12);
  CHECK(goal.max_speed == limits.max_linear_speed);
}

TEST_CASE("approach goal follows the object rotation") {
  GraspPolicy policy;
  policy.approach_offset = {0.05, 0.0, 0.10};
  policy.align_with_object = true;
  FsmLimits limits;

  const Quat yaw90 = Quat::from_axis_angle({0, 0, 1}, M_PI / 2.0);
  auto est = make_estimate({0.2, 0.1, 0.05}, yaw90, 0.9, "cup");
  CartesianGoal goal = plan_approach(est, policy, limits);

  CHECK(goal.target.translation.x == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(goal.target.translation.y == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(goal.target.translation.z == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(goal.target.rotation.angle_to(yaw90) < 1e-12);

  SUBCASE("base-frame policy ignores the object rotation") {
    policy.align_with_object = false;
    CartesianGoal fixed = plan_approach(est, policy, limits);
    CHECK(fixed.target.translation.x == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(fixed.target.translation.y == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(fixed.target.rotation.angle_to(Quat::identity()) < 1e-12);
  }
}

TEST_CASE("approach planning rejects bad preconditions") {
  GraspPolicy policy;
  FsmLimits limits;

  SUBCASE("low confidence") {
    auto est = make_estimate({0, 0, 0.1}, Quat::identity(), 0.2, "cup");
    CHECK_THROWS_AS(plan_approach(est, policy, limits), PlanningError);
  }
  SUBCASE("goal outside the workspace box") {
    auto est = make_estimate({2.0, 0, 0.1}, Quat::identity(), 0.9, "cup");
    CHECK_THROWS_AS(plan_approach(est, policy, limits), PlanningError);
  }
  SUBCASE("goal below the workspace floor") {
    auto est = make_estimate({0, 0, -0.5}, Quat::identity(), 0.9, "cup");
    CHECK_THROWS_AS(plan_approach(est, policy, limits), PlanningError);
  }
  SUBCASE("fingers cannot clear the feature") {
    policy.open_aperture = 0.010;
    policy.feature_radius = 0.008;
    policy.standoff = 0.005;
    auto est = make_estimate({0, 0, 0.1}, Quat::identity(), 0.9, "cup");
    CHECK_THROWS_AS(plan_approach(est, policy, limits), PlanningError);
  }
}

TEST_CASE("search plan is a lawnmower sweep over the region") {
  GraspPolicy policy;
  policy.search_region_x = 0.08;
  policy.search_region_y = 0.08;
  policy.search_pitch = 0.01;
  const Vec3 center{0.2, 0.1, 0.05};
  SearchState plan = make_search_plan(center, policy);

  REQUIRE(plan.waypoints.size() == 18);  // 9 rows, two ends each
  for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
    const Vec3& wp = plan.waypoints[i];
    CHECK(wp.z == doctest::Approx(center.z).epsilon(1e-15));
    CHECK(std::abs(wp.x - center.x) <= 0.04 + 1e-12);
    CHECK(std::abs(wp.y - center.y) <= 0.04 + 1e-12);
  }
  // Rows climb by one pitch and alternate direction.
  CHECK(plan.waypoints[0].y == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(plan.waypoints[17].y == doctest::Approx(0.14).epsilon(1e-12));
  CHECK(plan.waypoints[0].x == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(plan.waypoints[1].x == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(plan.waypoints[2].x == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(plan.waypoints[3].x == doctest::Approx(0.16).epsilon(1e-12));

  SUBCASE("zero-size region degenerates to the start point") {
    policy.search_region_x = 0.0;
    policy.search_region_y = 0.0;
    SearchState point = make_search_plan(center, policy);
    REQUIRE(point.waypoints.size() == 1);
    CHECK(distance(point.waypoints[0], center) == 0.0);
  }
}

TEST_CASE("search reports Found immediately when a flag is already set") {
  GraspPolicy policy;
  FsmLimits limits;
  SearchState state = make_search_plan({0, 0, 0.1}, policy);
  Command cmd = search_step(state, {false, true, false}, {0, 0, 0.1}, policy, limits);
  CHECK(state.status == SearchStatus::kFound);
  CHECK(std::holds_alternative<StopCommand>(cmd));
}

TEST_CASE("empty search region reports NotFound immediately") {
  GraspPolicy policy;
  policy.search_region_x = 0.0;
  policy.search_region_y = 0.0;
  FsmLimits limits;
  SearchState state = make_search_plan({0.1, 0.2, 0.1}, policy);
  Command cmd =
      search_step(state, {false, false, false}, {0.1, 0.2, 0.1}, policy, limits);
  CHECK(state.status == SearchStatus::kNotFound);
  CHECK(std::holds_alternative<StopCommand>(cmd));
}

TEST_CASE("search sweep visits every waypoint then exhausts") {
  GraspPolicy policy;
  policy.search_region_x = 0.04;
  policy.search_region_y = 0.02;
  policy.search_pitch = 0.01;
  policy.search_speed = 0.10;
  FsmLimits limits;

  const Vec3 center{0.0, 0.0, 0.05};
  SearchState state = make_search_plan(center, policy);
  REQUIRE(state.waypoints.size() == 6);

  Vec3 pos = center;
  std::vector<double> best(state.waypoints.size(), 1e9);
  bool exhausted = false;
  for (int n = 0; n < 5000; ++n) {
    Command cmd = search_step(state, {false, false, false}, pos, policy, limits);
    for (std::size_t i = 0; i < state.waypoints.size(); ++i) {
      best[i] = std::min(best[i], distance(pos, state.waypoints[i]));
    }
    if (state.status == SearchStatus::kNotFound) {
      exhausted = true;
      break;
    }
    const auto* vel = std::get_if<VelocityCommand>(&cmd);
    REQUIRE(vel != nullptr);
    CHECK(vel->linear.norm() == doctest::Approx(policy.search_speed).epsilon(1e-9));
    CHECK(vel->linear.z == doctest::Approx(0.0).epsilon(1e-15));
    pos += vel->linear * kDt;
  }
  CHECK(exhausted);
  for (double d : best) CHECK(d <= limits.goal_tol_m);
}

TEST_CASE("all fingers already touching completes the close immediately") {
  GraspPolicy policy;
  policy.required_contacts = 3;
  FsmLimits limits;
  CloseState state;
  Command cmd = close_fingers_step(state, {true, true, true}, 0.0, policy, limits);
  CHECK(state.complete);
  CHECK(std::holds_alternative<StopCommand>(cmd));
}

TEST_CASE("fingers freeze one by one and the close completes on the second contact") {
  GraspPolicy policy;
  policy.required_contacts = 2;
  policy.close_rate = 0.02;
  FsmLimits limits;
  CloseState state;

  double completion_t = -1.0;
  for (int n = 0; n <= 100; ++n) {
    const double t = n * kDt;
    std::array<bool, 3> touch{t >= 0.3, t >= 0.5, false};
    Command cmd = close_fingers_step(state, touch, t, policy, limits);
    if (state.complete) {
      completion_t = t;
      CHECK(std::holds_alternative<StopCommand>(cmd));
      break;
    }
    const auto* fin = std::get_if<FingerCommand>(&cmd);
    REQUIRE(fin != nullptr);
    CHECK(fin->rate == doctest::Approx(-policy.close_rate).epsilon(1e-12));
    if (t >= 0.3) CHECK_FALSE(fin->active[0]);
    if (t < 0.3) CHECK(fin->active[0]);
    CHECK(fin->active[1]);
    CHECK(fin->active[2]);
  }
  CHECK(completion_t == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("close without contact trips the watchdog") {
  GraspPolicy policy;
  FsmLimits limits;
  limits.state_timeout_s = 0.5;
  CloseState state;
  for (int n = 0; n < 100 && !state.timed_out; ++n) {
    close_fingers_step(state, {false, false, false}, n * kDt, policy, limits);
  }
  CHECK(state.timed_out);
  CHECK_FALSE(state.complete);
}

TEST_CASE("policy validation rejects out-of-range settings") {
  FsmLimits limits;
  GraspPolicy policy;
  SUBCASE("zero contacts") {
    policy.required_contacts = 0;
    CHECK_THROWS_AS(GraspFsm(policy, limits), ConfigError);
  }
  SUBCASE("four contacts") {
    policy.required_contacts = 4;
    CHECK_THROWS_AS(GraspFsm(policy, limits), ConfigError);
  }
  SUBCASE("zero attempts") {
    policy.max_attempts = 0;
    CHECK_THROWS_AS(GraspFsm(policy, limits), ConfigError);
  }
  SUBCASE("negative close rate") {
    policy.close_rate = -0.1;
    CHECK_THROWS_AS(GraspFsm(policy, limits), ConfigError);
  }
}

namespace {

struct NominalScript {
  GraspPolicy policy;
  FsmLimits limits;
  Vec3 object{0.2, 0.1, 0.05};
  Vec3 feature{0.21, 0.11, 0.0};  // offset from the estimate, found by sweeping

  NominalScript() {
    policy.target_label = "cup";
    policy.approach_offset = {0.0, 0.0, 0.08};
    policy.search_region_x = 0.04;
    policy.search_region_y = 0.04;
    policy.search_pitch = 0.01;
    policy.search_speed = 0.10;
    policy.required_contacts = 2;
    policy.close_rate = 0.05;
    policy.open_rate = 0.05;
    policy.open_aperture = 0.05;
    policy.lift_height = 0.10;
    policy.place_target = {-0.05, -0.05, 0.05};
    limits.state_timeout_s = 2.0;
  }

  // Runs the scripted world to completion; returns every command issued.
  std::vector<std::string> run(GraspFsm& fsm, TestArm& arm) const {
    std::vector<std::string> commands;
    for (int n = 0; n < 20000 && !fsm.finished(); ++n) {
      FsmInputs in;
      in.t = n * kDt;
      in.hand_pose = arm.pose;
      in.apertures = arm.apertures;
      if (n >= 2) in.estimate = make_estimate(object, Quat::identity(), 0.9, "cup");
      const double feature_dist =
          std::hypot(arm.pose.translation.x - feature.x,
                     arm.pose.translation.y - feature.y);
      const bool near_feature = feature_dist < 0.004;
      in.detected = {near_feature, false, false};
      in.touch = {arm.apertures[0] <= 0.03, arm.apertures[1] <= 0.03, false};
      Command cmd = fsm.tick(in);
      check_limits(cmd, fsm.limits());
      commands.push_back(command_repr(cmd));
      arm.apply(cmd, kDt);
    }
    return commands;
  }
};

}  // namespace

TEST_CASE("nominal run visits the full state sequence exactly once") {
  NominalScript script;
  GraspFsm fsm(script.policy, script.limits);
  TestArm arm;
  arm.pose.translation = {0.0, 0.0, 0.30};
  script.run(fsm, arm);

  REQUIRE(fsm.finished());
  CHECK(fsm.sequence_complete());
  CHECK(fsm.attempt() == 1);

  const std::vector<GraspStateId> expect{
      GraspStateId::kIdle,      GraspStateId::kPerceive, GraspStateId::kApproach,
      GraspStateId::kSearch,    GraspStateId::kClose,    GraspStateId::kLift,
      GraspStateId::kTransport, GraspStateId::kPlace,    GraspStateId::kDone};
  CHECK(visited_states(fsm) == expect);

  const std::vector<std::string> expect_reasons{
      "start",          "object_recognized", "approach_complete",
      "feature_detected", "grasp_secured",   "lift_complete",
      "transport_complete", "place_complete"};
  CHECK(reasons(fsm) == expect_reasons);
  check_close_provenance(fsm);

  // The hand ends at the place target with open fingers.
  CHECK(distance(arm.pose.translation, script.policy.place_target) <
        script.limits.goal_tol_m + 1e-9);
  for (double a : arm.apertures) CHECK(a >= script.policy.open_aperture - 1e-9);
}

TEST_CASE("identical scripts yield identical traces and command streams") {
  NominalScript script;

  GraspFsm fsm_a(script.policy, script.limits);
  TestArm arm_a;
  arm_a.pose.translation = {0.0, 0.0, 0.30};
  auto commands_a = script.run(fsm_a, arm_a);

  GraspFsm fsm_b(script.policy, script.limits);
  TestArm arm_b;
  arm_b.pose.translation = {0.0, 0.0, 0.30};
  auto commands_b = script.run(fsm_b, arm_b);

  CHECK(commands_a == commands_b);
  CHECK(format_trace(fsm_a.trace()) == format_trace(fsm_b.trace()));
}

TEST_CASE("missing perception times out to failure") {
  GraspPolicy policy;
  FsmLimits limits;
  limits.state_timeout_s = 0.5;
  GraspFsm fsm(policy, limits);
  TestArm arm;
  arm.pose.translation = {0.1, 0.1, 0.2};

  for (int n = 0; n < 200 && !fsm.finished(); ++n) {
    FsmInputs in;
    in.t = n * kDt;
    in.hand_pose = arm.pose;
    in.apertures = arm.apertures;
    Command cmd = fsm.tick(in);
    arm.apply(cmd, kDt);
  }
  REQUIRE(fsm.finished());
  CHECK_FALSE(fsm.sequence_complete());
  const std::vector<GraspStateId> expect{GraspStateId::kIdle, GraspStateId::kPerceive,
                                         GraspStateId::kDone};
  CHECK(visited_states(fsm) == expect);
  CHECK(fsm.trace().back().reason == "perception_timeout");
}

TEST_CASE("exhausted searches restart until the attempt budget runs out") {
  GraspPolicy policy;
  policy.approach_offset = {0.0, 0.0, 0.05};
  policy.search_region_x = 0.02;
  policy.search_region_y = 0.02;
  policy.search_pitch = 0.01;
  policy.search_speed = 0.10;
  policy.max_attempts = 3;
  FsmLimits limits;
  limits.state_timeout_s = 2.0;
  GraspFsm fsm(policy, limits);
  TestArm arm;
  arm.pose.translation = {0.0, 0.0, 0.30};

  std::vector<int> attempts_seen;
  for (int n = 0; n < 30000 && !fsm.finished(); ++n) {
    FsmInputs in;
    in.t = n * kDt;
    in.hand_pose = arm.pose;
    in.apertures = arm.apertures;
    in.estimate = make_estimate({0.2, 0.0, 0.05}, Quat::identity(), 0.9, "cup");
    Command cmd = fsm.tick(in);
    check_limits(cmd, limits);
    arm.apply(cmd, kDt);
    if (attempts_seen.empty() || fsm.attempt() != attempts_seen.back()) {
      attempts_seen.push_back(fsm.attempt());
    }
  }

  REQUIRE(fsm.finished());
  CHECK_FALSE(fsm.sequence_complete());
  CHECK(attempts_seen == std::vector<int>{1, 2, 3});
  CHECK(fsm.trace().back().reason == "attempts_exhausted");

  int exhausted = 0;
  int retries = 0;
  for (const Transition& tr : fsm.trace()) {
    if (tr.reason == "search_exhausted") ++exhausted;
    if (tr.reason == "retry") ++retries;
  }
  CHECK(exhausted == 3);
  CHECK(retries == 2);
  check_attempts(fsm, policy.max_attempts);
}

TEST_CASE("close watchdog aborts the attempt") {
  GraspPolicy policy;
  policy.approach_offset = {0.0, 0.0, 0.05};
  policy.max_attempts = 1;
  FsmLimits limits;
  limits.state_timeout_s = 0.5;
  GraspFsm fsm(policy, limits);
  TestArm arm;
  arm.pose.translation = {0.2, 0.0, 0.18};  // a short hop from the goal

  bool saw_close = false;
  for (int n = 0; n < 10000 && !fsm.finished(); ++n) {
    FsmInputs in;
    in.t = n * kDt;
    in.hand_pose = arm.pose;
    in.apertures = arm.apertures;
    in.estimate = make_estimate({0.2, 0.0, 0.08}, Quat::identity(), 0.9, "cup");
    // A detection fires as soon as the sweep starts; touch never does.
    in.detected = {fsm.state() == GraspStateId::kSearch, false, false};
    Command cmd = fsm.tick(in);
    arm.apply(cmd, kDt);
    saw_close = saw_close || fsm.state() == GraspStateId::kClose;
  }
  REQUIRE(fsm.finished());
  CHECK(saw_close);
  bool aborted = false;
  for (const Transition& tr : fsm.trace()) {
    if (tr.from == GraspStateId::kClose && tr.to == GraspStateId::kRestart &&
        tr.reason == "close_timeout") {
      aborted = true;
    }
  }
  CHECK(aborted);
  check_close_provenance(fsm);
}

TEST_CASE("table guard stops the descent above the surface") {
  GraspPolicy policy;
  policy.approach_offset = {0.0, 0.0, 0.01};
  policy.standoff = 0.01;
  policy.table_height = 0.0;
  policy.guard_margin = 0.015;
  FsmLimits limits;
  GraspFsm fsm(policy, limits);
  TestArm arm;
  arm.pose.translation = {0.2, 0.1, 0.20};

  // Object just above the table; the goal asks for a fingertip height of
  // 1 cm, below the guard band.
  const auto estimate = make_estimate({0.2, 0.1, 0.0}, Quat::identity(), 0.9, "cup");
  const double lowest_allowed =
      policy.table_height + policy.guard_margin - limits.max_linear_speed * kDt;

  double min_z = arm.pose.translation.z;
  bool reached_search = false;
  for (int n = 0; n < 5000 && !reached_search && !fsm.finished(); ++n) {
    FsmInputs in;
    in.t = n * kDt;
    in.hand_pose = arm.pose;
    in.apertures = arm.apertures;
    in.estimate = estimate;
    in.detected = {true, true, true};  // proximity sees the table the whole way
    const bool guard = arm.pose.translation.z < policy.table_height + policy.guard_margin;
    const double z_before = arm.pose.translation.z;
    Command cmd = fsm.tick(in);
    arm.apply(cmd, kDt);
    if (guard) CHECK(arm.pose.translation.z >= z_before - 1e-12);
    min_z = std::min(min_z, arm.pose.translation.z);
    reached_search = fsm.state() == GraspStateId::kSearch;
  }

  CHECK(reached_search);  // the guard substitutes for vertical convergence
  CHECK(min_z >= lowest_allowed - 1e-12);
}

TEST_CASE("adversarial inputs always terminate within the liveness bound") {
  GraspPolicy policy;
  policy.target_label = "t";
  policy.search_region_x = 0.02;
  policy.search_region_y = 0.02;
  policy.search_pitch = 0.01;
  policy.search_speed = 0.10;
  policy.max_attempts = 3;
  FsmLimits limits;
  limits.state_timeout_s = 0.5;

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    GraspFsm fsm(policy, limits);
    const RigidTransform hand{Quat::identity(), {0.1, 0.1, 0.2}, "hand", "base"};

    int final_tick = -1;
    for (int n = 0; n < 4000; ++n) {
      FsmInputs in;
      in.t = n * kDt;
      in.hand_pose = hand;
      in.apertures = {0.05, 0.05, 0.05};
      if (n % 37 == 0) {
        const char* label = rng.uniform() < 0.5 ? "t" : "x";
        Vec3 p{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
        in.estimate = make_estimate(p, rng.random_rotation(), rng.uniform(), label);
      }
      for (int i = 0; i < 3; ++i) {
        in.touch[i] = rng.uniform() < 0.10;
        in.detected[i] = rng.uniform() < 0.10;
      }
      Command cmd = fsm.tick(in);
      check_limits(cmd, limits);
      CHECK(fsm.attempt() >= 1);
      CHECK(fsm.attempt() <= policy.max_attempts);
      if (fsm.finished()) {
        final_tick = n;
        break;
      }
    }
    REQUIRE(final_tick >= 0);
    CHECK(final_tick * kDt <= 20.0);
    check_close_provenance(fsm);
    check_attempts(fsm, policy.max_attempts);
  }
}
