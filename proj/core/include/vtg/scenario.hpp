#pragma once

// Scripted end-to-end episodes.  A scenario file describes the world, the
// sensor rig, the grasp policy and the run settings; run_scenario closes the
// loop of rendered perception, proximity-driven tactile detection, the grasp
// sequencer and the kinematic arm at a fixed tick rate, and reports the
// outcome.
//
// File format: INI-style sections [world], [rig], [policy], [noise], [run]
// with `key = value` lines; `#` and `;` start comments.  All lengths are
// meters, angles degrees, rates hertz.  Parse errors carry line numbers.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vtg/grasp_fsm.hpp"
#include "vtg/params.hpp"
#include "vtg/sim_world.hpp"
#include "vtg/tactile.hpp"

namespace vtg {

// Systematic pose error injected between the true and the believed camera
// mount: a per-seed constant bias of the given magnitude in a random
// direction (uniform on the sphere, or on the horizontal circle when
// planar).  Every perception result is reported through the biased mount.
struct CalibrationNoiseSpec {
  double offset_m = 0.0;
  double rotation_deg = 0.0;
  bool planar = false;
};

struct RunSettings {
  std::uint64_t seed = 1;
  double tick_rate_hz = 100.0;
  double max_time_s = 60.0;
  std::string target_object;  // defaults to the policy target label
  Vec3 region_min{0.0, 0.0, 0.0};  // success box for the target object
  Vec3 region_max{0.0, 0.0, 0.0};
  bool search_enabled = true;
  bool snapshot_clouds = false;
  Vec3 hand_start{0.0, 0.0, 0.30};
};

struct Scenario {
  WorldModel world;
  SensorRig rig;
  GraspPolicy policy;
  FsmLimits limits;
  Params params;
  CalibrationNoiseSpec noise;
  RunSettings run;
};

// Throws ConfigError with "<name>:<line>: ..." on malformed input.
Scenario load_scenario(std::istream& in, const std::string& name = "<stream>");
Scenario load_scenario_file(const std::string& path);

struct RunReport {
  bool success = false;
  int attempts = 0;
  std::string done_reason;
  bool sequence_complete = false;
  double sim_time_s = 0.0;
  double wall_time_s = 0.0;     // informational; never serialized
  double min_fingertip_z = 0.0;  // lowest tip height reached over the run
  std::vector<TactileEvent> events;
  std::vector<Transition> trace;
  std::vector<std::pair<std::string, RigidTransform>> final_poses;
  std::vector<PointCloud> snapshots;
};

// Runs one episode to completion (or the time budget) and judges success by
// the target object's final position against the run region.  Deterministic:
// the same scenario and seed produce identical reports.
RunReport run_scenario(const Scenario& scenario);
RunReport run_scenario(const Scenario& scenario, std::uint64_t seed);

// Writes trace.log, events.csv, report.txt and any cloud snapshots into
// `dir` (created if needed).  Identical reports serialize byte-identically.
void write_report(const RunReport& report, const std::string& dir);

}  // namespace vtg
