#pragma once

// Hand-eye calibration from tag sightings.  A tag is rigidly mounted to the
// wrist; each observation pairs the tag pose seen by the camera with the
// wrist pose from forward kinematics.  One observation fixes the camera in
// the base frame:
//
//   base_to_camera = base_to_wrist * wrist_to_tag * inverse(cam_to_tag)
//
// Batches average translations arithmetically and rotations by the
// largest-eigenvector quaternion method; the residual is the mean distance
// of the per-observation camera positions from their mean.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vtg/geometry.hpp"

namespace vtg {

struct CalibrationObservation {
  RigidTransform cam_to_tag;     // tag pose in the camera frame (noisy)
  RigidTransform base_to_wrist;  // wrist pose in the base frame (exact)
};

struct CalibrationResult {
  RigidTransform base_to_camera;
  double residual = 0.0;  // meters
  std::size_t n_observations = 0;
};

RigidTransform solve_single(const CalibrationObservation& obs,
                            const RigidTransform& wrist_to_tag);

CalibrationResult solve_batch(const std::vector<CalibrationObservation>& obs,
                              const RigidTransform& wrist_to_tag);

// (translation distance in meters, relative rotation angle in degrees).
// Throws FrameMismatchError unless both transforms share their frame labels.
std::pair<double, double> calibration_error(const RigidTransform& estimate,
                                            const RigidTransform& truth);

// Observation file: one line per observation, cam_to_tag then base_to_wrist,
// each as "tx ty tz qw qx qy qz" (14 numbers).  Quaternions are normalized
// on load; malformed lines are rejected with their line number.
std::vector<CalibrationObservation> load_observations(
    std::istream& in, const std::string& name = "<stream>");
std::vector<CalibrationObservation> load_observations_file(
    const std::string& path);
void save_observations(std::ostream& out,
                       const std::vector<CalibrationObservation>& obs);
void save_observations_file(const std::string& path,
                            const std::vector<CalibrationObservation>& obs);

}  // namespace vtg
