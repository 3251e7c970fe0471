#pragma once

// Central tunables for the perception and recognition stages plus the
// tactile detector defaults.  Every value can be overridden from the command
// line with --set <dotted.key>=<value>; unknown keys are rejected.

#include <cstddef>
#include <string>
#include <vector>

namespace vtg {

struct PerceptionParams {
  double normal_radius = 0.01;      // m
  double ransac_threshold = 0.005;  // m
  int ransac_iters = 500;
  double cluster_tolerance = 0.02;  // m
  std::size_t cluster_min_size = 50;
  std::size_t cluster_max_size = 100000000;
  double hue_tolerance_deg = 30.0;
};

struct RecognitionParams {
  double match_threshold = 0.6;
  double local_radius = 0.05;   // m, support radius for local descriptors
  double normal_radius = 0.01;  // m, for template/query normal estimation
  int keypoint_stride = 25;     // template keypoints are every n-th point
};

enum class Polarity {
  kAsWritten,  // flags set on negative deviation, cleared on positive
  kFig6,       // flags set on positive deviation, cleared on negative
};

struct TactileParams {
  double cutoff_hz = 20.0;
  double touch_threshold = 5.0;    // counts, fast channel
  double object_threshold = 20.0;  // counts, slow channel
  Polarity touch_polarity = Polarity::kFig6;
  Polarity object_polarity = Polarity::kFig6;
  std::size_t baseline_frames = 50;  // leading frames used to calibrate
};

struct Params {
  PerceptionParams perception;
  RecognitionParams recognition;
  TactileParams tactile;
};

// Applies "section.key=value"; throws ConfigError for unknown keys or
// unparseable values.
void apply_override(Params& params, const std::string& assignment);

// Convenience: applies each assignment in order.
void apply_overrides(Params& params, const std::vector<std::string>& assignments);

std::string to_string(Polarity p);
Polarity polarity_from_string(const std::string& s);

}  // namespace vtg
