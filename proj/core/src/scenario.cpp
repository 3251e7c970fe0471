#include "vtg/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "vtg/cloud_io.hpp"
#include "vtg/error.hpp"
#include "vtg/perception.hpp"
#include "vtg/recognition.hpp"
#include "vtg/rng.hpp"

namespace vtg {
namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail_at(const std::string& name, int line,
                          const std::string& message) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& name, int line, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail_at(name, line, "expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) {
    fail_at(name, line, "expected a number, got '" + s + "'");
  }
  return v;
}

std::vector<double> parse_doubles(const std::string& name, int line,
                                  const std::string& s, std::size_t count) {
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(name, line, tok));
  if (out.size() != count) {
    fail_at(name, line, "expected " + std::to_string(count) + " numbers, got " +
                            std::to_string(out.size()));
  }
  return out;
}

Vec3 parse_vec3(const std::string& name, int line, const std::string& s) {
  const auto v = parse_doubles(name, line, s, 3);
  return {v[0], v[1], v[2]};
}

bool parse_bool(const std::string& name, int line, const std::string& s) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  fail_at(name, line, "expected a boolean (0/1/true/false), got '" + s + "'");
}

int parse_int(const std::string& name, int line, const std::string& s) {
  const double v = parse_double(name, line, s);
  const int i = static_cast<int>(std::llround(v));
  if (v != static_cast<double>(i)) {
    fail_at(name, line, "expected an integer, got '" + s + "'");
  }
  return i;
}

std::uint64_t parse_seed(const std::string& name, int line,
                         const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail_at(name, line, "expected a non-negative integer, got '" + s + "'");
}

SimObject parse_object(const std::string& name, int line,
                       const std::string& value) {
  std::istringstream in(value);
  SimObject obj;
  std::string shape;
  if (!(in >> obj.label >> shape)) {
    fail_at(name, line, "object needs '<label> <shape> ...'");
  }

  auto next = [&](const char* what) {
    std::string tok;
    if (!(in >> tok)) {
      fail_at(name, line, std::string("object is missing ") + what);
    }
    return parse_double(name, line, tok);
  };

  if (shape == "box") {
    obj.shape.kind = ShapeKind::kBox;
    obj.shape.half_extents = {next("half extent x"), next("half extent y"),
                              next("half extent z")};
  } else if (shape == "cylinder") {
    obj.shape.kind = ShapeKind::kCylinder;
    obj.shape.radius = next("radius");
    obj.shape.half_length = next("half length");
  } else if (shape == "capsule") {
    obj.shape.kind = ShapeKind::kCapsule;
    obj.shape.radius = next("radius");
    obj.shape.half_length = next("half length");
  } else if (shape == "ellipsoid") {
    obj.shape.kind = ShapeKind::kEllipsoid;
    obj.shape.half_extents = {next("radius x"), next("radius y"),
                              next("radius z")};
  } else if (shape == "spoon") {
    obj.shape.kind = ShapeKind::kSpoon;
    obj.shape.radius = next("handle radius");
    obj.shape.half_length = next("handle half length");
    obj.shape.bowl_radii = {next("bowl radius x"), next("bowl radius y"),
                            next("bowl radius z")};
  } else {
    fail_at(name, line, "unknown shape '" + shape + "'");
  }

  std::string word;
  if (!(in >> word) || word != "pose") {
    fail_at(name, line, "object needs 'pose <tx> <ty> <tz> <yaw_deg>'");
  }
  const double tx = next("pose tx");
  const double ty = next("pose ty");
  const double tz = next("pose tz");
  const double yaw = next("pose yaw") * kPi / 180.0;
  obj.pose.rotation = Quat::from_axis_angle({0, 0, 1}, yaw);
  obj.pose.translation = {tx, ty, tz};
  obj.pose.from_frame = obj.label;
  obj.pose.to_frame = "base";

  if (in >> word) {
    if (word != "color") fail_at(name, line, "unexpected token '" + word + "'");
    obj.color = {next("color r"), next("color g"), next("color b")};
    if (in >> word) fail_at(name, line, "unexpected token '" + word + "'");
  }
  return obj;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Scenario load_scenario(std::istream& in, const std::string& name) {
  Scenario sc;
  Vec3 camera_position{0.5, 0.0, 0.6};
  Vec3 camera_look_at{0.0, 0.0, 0.0};
  bool run_target_set = false;

  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find_first_of("#;");
    if (comment != std::string::npos) raw.erase(comment);
    const std::string text = trim(raw);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') fail_at(name, line, "unterminated section header");
      section = text.substr(1, text.size() - 2);
      if (section != "world" && section != "rig" && section != "policy" &&
          section != "noise" && section != "run") {
        fail_at(name, line, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) fail_at(name, line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) fail_at(name, line, "missing key before '='");
    if (value.empty()) fail_at(name, line, "missing value for '" + key + "'");
    if (section.empty()) {
      fail_at(name, line, "'" + key + "' appears before any [section]");
    }

    if (section == "world") {
      if (key == "table_height") {
        sc.world.table_height = parse_double(name, line, value);
      } else if (key == "table_extent") {
        const auto v = parse_doubles(name, line, value, 4);
        sc.world.table_min_x = v[0];
        sc.world.table_min_y = v[1];
        sc.world.table_max_x = v[2];
        sc.world.table_max_y = v[3];
        if (v[0] >= v[2] || v[1] >= v[3]) {
          fail_at(name, line, "table extent is empty");
        }
      } else if (key == "table_color") {
        sc.world.table_color = parse_vec3(name, line, value);
      } else if (key == "object") {
        sc.world.objects.push_back(parse_object(name, line, value));
      } else {
        fail_at(name, line, "unknown [world] key '" + key + "'");
      }
    } else if (section == "rig") {
      if (key == "camera_position") {
        camera_position = parse_vec3(name, line, value);
      } else if (key == "camera_look_at") {
        camera_look_at = parse_vec3(name, line, value);
      } else if (key == "points_per_m2") {
        sc.rig.points_per_m2 = parse_double(name, line, value);
      } else if (key == "depth_sigma") {
        sc.rig.depth_sigma = parse_double(name, line, value);
      } else if (key == "sensor_rate_hz") {
        sc.rig.sensor_rate_hz = parse_double(name, line, value);
      } else if (key == "prox_amplitude") {
        sc.rig.prox.amplitude = parse_double(name, line, value);
      } else if (key == "prox_decay") {
        sc.rig.prox.decay = parse_double(name, line, value);
      } else if (key == "prox_sigma") {
        sc.rig.prox.sigma = parse_double(name, line, value);
      } else if (key == "prox_baseline") {
        sc.rig.prox.baseline = parse_double(name, line, value);
      } else if (key == "prox_impulse") {
        sc.rig.prox.impulse = parse_double(name, line, value);
      } else if (key == "finger_curl") {
        sc.rig.finger_curl = parse_double(name, line, value);
      } else {
        fail_at(name, line, "unknown [rig] key '" + key + "'");
      }
    } else if (section == "policy") {
      if (key == "target") {
        sc.policy.target_label = value;
      } else if (key == "min_confidence") {
        sc.policy.min_confidence = parse_double(name, line, value);
      } else if (key == "approach_offset") {
        sc.policy.approach_offset = parse_vec3(name, line, value);
      } else if (key == "approach_yaw_deg") {
        sc.policy.approach_rotation = Quat::from_axis_angle(
            {0, 0, 1}, parse_double(name, line, value) * kPi / 180.0);
      } else if (key == "align_with_object") {
        sc.policy.align_with_object = parse_bool(name, line, value);
      } else if (key == "standoff") {
        sc.policy.standoff = parse_double(name, line, value);
      } else if (key == "feature_radius") {
        sc.policy.feature_radius = parse_double(name, line, value);
      } else if (key == "search_region") {
        const auto v = parse_doubles(name, line, value, 2);
        sc.policy.search_region_x = v[0];
        sc.policy.search_region_y = v[1];
      } else if (key == "search_pitch") {
        sc.policy.search_pitch = parse_double(name, line, value);
      } else if (key == "search_speed") {
        sc.policy.search_speed = parse_double(name, line, value);
      } else if (key == "required_contacts") {
        sc.policy.required_contacts = parse_int(name, line, value);
      } else if (key == "max_attempts") {
        sc.policy.max_attempts = parse_int(name, line, value);
      } else if (key == "close_rate") {
        sc.policy.close_rate = parse_double(name, line, value);
      } else if (key == "open_rate") {
        sc.policy.open_rate = parse_double(name, line, value);
      } else if (key == "open_aperture") {
        sc.policy.open_aperture = parse_double(name, line, value);
      } else if (key == "lift_height") {
        sc.policy.lift_height = parse_double(name, line, value);
      } else if (key == "place_target") {
        sc.policy.place_target = parse_vec3(name, line, value);
      } else if (key == "guard_margin") {
        sc.policy.guard_margin = parse_double(name, line, value);
      } else {
        fail_at(name, line, "unknown [policy] key '" + key + "'");
      }
    } else if (section == "noise") {
      if (key == "calibration_offset_m") {
        sc.noise.offset_m = parse_double(name, line, value);
      } else if (key == "calibration_rotation_deg") {
        sc.noise.rotation_deg = parse_double(name, line, value);
      } else if (key == "planar") {
        sc.noise.planar = parse_bool(name, line, value);
      } else {
        fail_at(name, line, "unknown [noise] key '" + key + "'");
      }
    } else {  // run
      if (key == "seed") {
        sc.run.seed = parse_seed(name, line, value);
      } else if (key == "tick_rate_hz") {
        sc.run.tick_rate_hz = parse_double(name, line, value);
      } else if (key == "max_time_s") {
        sc.run.max_time_s = parse_double(name, line, value);
      } else if (key == "target") {
        sc.run.target_object = value;
        run_target_set = true;
      } else if (key == "target_region") {
        const auto v = parse_doubles(name, line, value, 6);
        sc.run.region_min = {v[0], v[1], v[2]};
        sc.run.region_max = {v[3], v[4], v[5]};
      } else if (key == "search") {
        sc.run.search_enabled = parse_bool(name, line, value);
      } else if (key == "snapshot_clouds") {
        sc.run.snapshot_clouds = parse_bool(name, line, value);
      } else if (key == "hand_start") {
        sc.run.hand_start = parse_vec3(name, line, value);
      } else if (key == "state_timeout_s") {
        sc.limits.state_timeout_s = parse_double(name, line, value);
      } else if (key == "goal_tol_m") {
        sc.limits.goal_tol_m = parse_double(name, line, value);
      } else if (key == "set") {
        try {
          apply_override(sc.params, value);
        } catch (const ConfigError& e) {
          fail_at(name, line, e.what());
        }
      } else {
        fail_at(name, line, "unknown [run] key '" + key + "'");
      }
    }
  }

  if (distance(camera_position, camera_look_at) < 1e-9) {
    throw ConfigError(name + ": camera position coincides with its look-at point");
  }
  sc.rig.base_to_camera = look_at_pose(camera_position, camera_look_at);
  sc.policy.table_height = sc.world.table_height;
  if (!run_target_set) sc.run.target_object = sc.policy.target_label;
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  return load_scenario(in, path);
}

RunReport run_scenario(const Scenario& scenario) {
  return run_scenario(scenario, scenario.run.seed);
}

RunReport run_scenario(const Scenario& scenario, std::uint64_t seed) {
  const auto wall_start = std::chrono::steady_clock::now();

  const WorldModel& world_template = scenario.world;
  check_objects_rest_on_table(world_template);
  if (world_template.objects.empty()) {
    throw ConfigError("scenario has no objects");
  }

  std::string target = scenario.run.target_object;
  if (target.empty()) target = world_template.objects.front().label;
  const SimObject* target_object = nullptr;
  for (const SimObject& obj : world_template.objects) {
    if (obj.label == target) {
      target_object = &obj;
      break;
    }
  }
  if (target_object == nullptr) {
    throw ConfigError("target object '" + target + "' is not in the world");
  }

  const double ratio = scenario.rig.sensor_rate_hz / scenario.run.tick_rate_hz;
  const int substeps = static_cast<int>(std::llround(ratio));
  if (substeps < 1 || std::abs(ratio - substeps) > 1e-9) {
    throw ConfigError("sensor rate must be an integer multiple of the tick rate");
  }
  if (scenario.params.tactile.baseline_frames < 10) {
    throw ConfigError("baseline_frames must be at least 10");
  }
  if (!(scenario.run.tick_rate_hz > 0) || !(scenario.run.max_time_s > 0)) {
    throw ConfigError("tick rate and time budget must be positive");
  }

  GraspPolicy policy = scenario.policy;
  policy.table_height = scenario.world.table_height;
  if (!scenario.run.search_enabled) {
    policy.search_region_x = 0.0;
    policy.search_region_y = 0.0;
  }
  FsmLimits limits = scenario.limits;
  limits.tick_period_s = 1.0 / scenario.run.tick_rate_hz;
  GraspFsm fsm(policy, limits);  // validates the policy before any work

  WorldModel world = world_template;
  Rng master(seed);

  // Believed camera mount: the true pose composed with a per-seed bias.
  Rng bias_rng = master.stream(1);
  RigidTransform bias = RigidTransform::identity("base");
  {
    const Vec3 dir3 = bias_rng.unit_vector();
    const double angle = bias_rng.uniform(0.0, 2.0 * kPi);
    const Vec3 dir = scenario.noise.planar
                         ? Vec3{std::cos(angle), std::sin(angle), 0.0}
                         : dir3;
    bias.translation = dir * scenario.noise.offset_m;
    const Vec3 axis = bias_rng.unit_vector();
    bias.rotation = Quat::from_axis_angle(
        axis, scenario.noise.rotation_deg * kPi / 180.0);
  }
  const RigidTransform believed_camera =
      compose(bias, scenario.rig.base_to_camera);

  // One template per object, rendered alone on the table without noise and
  // segmented the same way live queries are.
  const PerceptionParams& pp = scenario.params.perception;
  const RecognitionParams& rp = scenario.params.recognition;
  std::vector<ObjectTemplate> db;
  for (std::size_t i = 0; i < world.objects.size(); ++i) {
    WorldModel solo = world;
    solo.objects = {world.objects[i]};
    SensorRig clean = scenario.rig;
    clean.depth_sigma = 0.0;
    const PointCloud cloud =
        render_cloud(solo, clean, master.stream(300 + i).next_u64());
    const PlaneFit fit =
        segment_plane_ransac(cloud, pp.ransac_threshold, pp.ransac_iters,
                             master.stream(400 + i).next_u64());
    const PointCloud rest = remove_indices(cloud, fit.inliers);
    const auto clusters = euclidean_cluster(rest, pp.cluster_tolerance,
                                            pp.cluster_min_size,
                                            pp.cluster_max_size);
    if (clusters.empty()) {
      throw ConfigError("object '" + world.objects[i].label +
                        "' is not visible to the template render");
    }
    db.push_back(make_template(world.objects[i].label,
                               extract(rest, clusters.front()), rp));
  }

  // Arm and tactile baselines at the start pose.
  ArmState arm;
  arm.hand.translation = scenario.run.hand_start;
  arm.max_aperture = policy.open_aperture;
  arm.finger_curl = scenario.rig.finger_curl;
  arm.apertures = {policy.open_aperture, policy.open_aperture,
                   policy.open_aperture};

  const auto lowest_tip = [](const ArmState& a) {
    const std::array<Vec3, 3> tips = fingertip_positions(a);
    return std::min({tips[0].z, tips[1].z, tips[2].z});
  };

  Rng prox_rng = master.stream(2);
  std::array<FingerSensorState, 3> sensor_state;
  ChannelState channels;
  const double sensor_dt = 1.0 / scenario.rig.sensor_rate_hz;
  {
    const int rest_frames =
        static_cast<int>(scenario.params.tactile.baseline_frames);
    std::vector<TactileFrame> rest(rest_frames);
    const auto tips = fingertip_positions(arm);
    const auto dirs = fingertip_ray_dirs(arm);
    for (int k = 0; k < rest_frames; ++k) {
      rest[k].t = (k - rest_frames) * sensor_dt;
      for (int i = 0; i < 3; ++i) {
        rest[k].raw[i] = proximity_sample(world, sensor_state[i], tips[i],
                                          dirs[i], scenario.rig.prox, prox_rng);
      }
    }
    calibrate_baseline(channels, rest);
  }

  RunReport report;
  report.min_fingertip_z = lowest_tip(arm);
  const double tick_dt = 1.0 / scenario.run.tick_rate_hz;
  std::size_t tick = 0;
  int render_count = 0;
  bool perceived_this_visit = false;

  while (true) {
    const double t = static_cast<double>(tick) * tick_dt;
    if (t > scenario.run.max_time_s) break;

    for (int j = 0; j < substeps; ++j) {
      TactileFrame frame;
      frame.t =
          static_cast<double>(tick * static_cast<std::size_t>(substeps) + j) *
          sensor_dt;
      const auto tips = fingertip_positions(arm);
      const auto dirs = fingertip_ray_dirs(arm);
      for (int i = 0; i < 3; ++i) {
        frame.raw[i] = proximity_sample(world, sensor_state[i], tips[i],
                                        dirs[i], scenario.rig.prox, prox_rng);
      }
      auto evs = process_frame(channels, frame, scenario.params.tactile);
      report.events.insert(report.events.end(), evs.begin(), evs.end());
    }

    FsmInputs in;
    in.t = t;
    in.hand_pose = arm.hand;
    in.apertures = arm.apertures;
    for (int i = 0; i < 3; ++i) {
      in.touch[i] = channels.fingers[i].touch;
      in.detected[i] = channels.fingers[i].detected;
    }

    if (fsm.state() == GraspStateId::kPerceive) {
      if (!perceived_this_visit) {
        perceived_this_visit = true;

        // The hand is parked while planning, so re-zero the tactile
        // baselines the way the real rig is recalibrated right before a
        // grasp.  This also releases detection flags left over from a
        // previous attempt.
        {
          const int rest_frames =
              static_cast<int>(scenario.params.tactile.baseline_frames);
          const double t_last =
              static_cast<double>(tick * static_cast<std::size_t>(substeps) +
                                  static_cast<std::size_t>(substeps) - 1) *
              sensor_dt;
          const auto tips = fingertip_positions(arm);
          const auto dirs = fingertip_ray_dirs(arm);
          std::vector<TactileFrame> rest(rest_frames);
          for (int k = 0; k < rest_frames; ++k) {
            rest[k].t = t_last + (k + 1) * sensor_dt / (rest_frames + 1);
            for (int i = 0; i < 3; ++i) {
              rest[k].raw[i] =
                  proximity_sample(world, sensor_state[i], tips[i], dirs[i],
                                   scenario.rig.prox, prox_rng);
            }
          }
          calibrate_baseline(channels, rest);
        }

        const PointCloud cloud = render_cloud(
            world, scenario.rig, master.stream(100 + render_count).next_u64());
        if (scenario.run.snapshot_clouds) report.snapshots.push_back(cloud);
        const auto estimates =
            recognize_scene(cloud, db, pp, rp,
                            master.stream(200 + render_count).next_u64());
        ++render_count;

        const PoseEstimate* best = nullptr;
        for (const PoseEstimate& e : estimates) {
          const bool label_ok =
              policy.target_label.empty() || e.label == policy.target_label;
          const bool best_ok =
              best != nullptr && (policy.target_label.empty() ||
                                  best->label == policy.target_label);
          if (best == nullptr || (label_ok && !best_ok) ||
              (label_ok == best_ok && e.confidence > best->confidence)) {
            best = &e;
          }
        }
        if (best != nullptr) {
          PoseEstimate seen = *best;
          seen.pose = compose(believed_camera, seen.pose);
          in.estimate = seen;
        }
      }
    } else {
      perceived_this_visit = false;
    }

    const Command cmd = fsm.tick(in);
    step_arm(world, arm, cmd, tick_dt, limits, policy.required_contacts);
    report.min_fingertip_z = std::min(report.min_fingertip_z, lowest_tip(arm));
    ++tick;
    report.sim_time_s = static_cast<double>(tick) * tick_dt;
    if (fsm.finished()) break;
  }

  report.attempts = fsm.attempt();
  report.trace = fsm.trace();
  report.sequence_complete = fsm.sequence_complete();
  report.done_reason =
      fsm.finished() && !fsm.trace().empty() ? fsm.trace().back().reason
                                             : "time_budget_exhausted";

  const Vec3 where = [&] {
    for (const SimObject& obj : world.objects) {
      if (obj.label == target) return obj.pose.translation;
    }
    return Vec3{};
  }();
  report.success = where.x >= scenario.run.region_min.x &&
                   where.x <= scenario.run.region_max.x &&
                   where.y >= scenario.run.region_min.y &&
                   where.y <= scenario.run.region_max.y &&
                   where.z >= scenario.run.region_min.z &&
                   where.z <= scenario.run.region_max.z;

  for (const SimObject& obj : world.objects) {
    report.final_poses.emplace_back(obj.label, obj.pose);
  }

  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    wall_start)
          .count();
  return report;
}

void write_report(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    std::ofstream out(fs::path(dir) / "trace.log");
    if (!out) throw IoError("cannot write trace.log in '" + dir + "'");
    out << format_trace(report.trace);
  }
  {
    std::ofstream out(fs::path(dir) / "events.csv");
    if (!out) throw IoError("cannot write events.csv in '" + dir + "'");
    out << "t,finger,kind\n";
    for (const TactileEvent& e : report.events) {
      out << fmt_double(e.t) << ',' << e.finger << ',' << to_string(e.kind)
          << '\n';
    }
  }
  {
    std::ofstream out(fs::path(dir) / "report.txt");
    if (!out) throw IoError("cannot write report.txt in '" + dir + "'");
    out << "success=" << (report.success ? 1 : 0) << '\n';
    out << "attempts=" << report.attempts << '\n';
    out << "done_reason=" << report.done_reason << '\n';
    out << "sequence_complete=" << (report.sequence_complete ? 1 : 0) << '\n';
    out << "sim_time_s=" << fmt_double(report.sim_time_s) << '\n';
    out << "min_fingertip_z=" << fmt_double(report.min_fingertip_z) << '\n';
    for (const auto& [label, pose] : report.final_poses) {
      out << "pose." << label << '=' << fmt_double(pose.translation.x) << ' '
          << fmt_double(pose.translation.y) << ' '
          << fmt_double(pose.translation.z) << ' ' << fmt_double(pose.rotation.w)
          << ' ' << fmt_double(pose.rotation.x) << ' '
          << fmt_double(pose.rotation.y) << ' ' << fmt_double(pose.rotation.z)
          << '\n';
    }
  }
  for (std::size_t i = 0; i < report.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "cloud_%03zu.cloud", i);
    save_cloud_file((fs::path(dir) / name).string(), report.snapshots[i]);
  }
}

}  // namespace vtg
