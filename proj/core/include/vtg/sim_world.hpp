#pragma once

// Deterministic synthetic test bench: primitive objects resting on a table,
// analytic depth-cloud rendering, fingertip proximity signal synthesis and a
// kinematic end-effector that executes grasp commands.
//
// Hand model: three fingers spaced 120 degrees around the hand z axis, each
// fingertip at its aperture's radial distance from the axis.  Fully open
// tips sit in the hand's z = 0 plane; closing curls them inward and down at
// the configured curl slope, so the tips sweep a cone through the cage.
// Each fingertip carries one proximity sensor whose sensing ray points
// along the tip's closing path.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vtg/geometry.hpp"
#include "vtg/grasp_fsm.hpp"
#include "vtg/rng.hpp"

namespace vtg {

enum class ShapeKind { kBox, kCylinder, kCapsule, kEllipsoid, kSpoon };

// Parameter union for all shapes; unused fields are ignored per kind.
//  - box:        half_extents
//  - cylinder:   radius, half_length (axis z)
//  - capsule:    radius, half_length (segment along z)
//  - ellipsoid:  half_extents as the three radii
//  - spoon:      radius/half_length for the handle capsule lying along +x,
//                bowl_radii for the shallow ellipsoid bowl at the +x end
struct Shape {
  ShapeKind kind = ShapeKind::kBox;
  Vec3 half_extents{0.01, 0.01, 0.01};
  double radius = 0.01;
  double half_length = 0.05;
  Vec3 bowl_radii{0.02, 0.014, 0.006};
};

struct SimObject {
  std::string label;
  Shape shape;
  RigidTransform pose;  // object frame in the base frame
  Vec3 color{0.8, 0.2, 0.2};
};

struct WorldModel {
  double table_height = 0.0;
  double table_min_x = -0.4;
  double table_min_y = -0.4;
  double table_max_x = 0.4;
  double table_max_y = 0.4;
  Vec3 table_color{0.5, 0.5, 0.5};
  std::vector<SimObject> objects;
};

// Convex piece of an exploded object, posed in the base frame.  Spoons
// decompose into a handle capsule and a bowl ellipsoid; every other shape
// is a single part.
struct PrimitivePart {
  ShapeKind kind = ShapeKind::kBox;  // never kSpoon
  Vec3 half_extents{0.01, 0.01, 0.01};
  double radius = 0.01;
  double half_length = 0.05;
  RigidTransform pose;
};

std::vector<PrimitivePart> object_parts(const SimObject& object);

// Exact membership and ray tests used for contact, occlusion and proximity.
bool inside_part(const PrimitivePart& part, const Vec3& p);
bool inside_any_object(const WorldModel& world, const Vec3& p);
// Smallest t >= 0 with origin + t*dir on the part surface (0 when the
// origin is inside); empty when the ray misses.  dir must be unit length.
std::optional<double> ray_part(const PrimitivePart& part, const Vec3& origin,
                               const Vec3& dir);
// Lowest z reached by the part surface (support point straight down).
double lowest_surface_z(const PrimitivePart& part);

// Throws ConfigError unless every object's lowest surface point lies on the
// table plane within 1 mm.
void check_objects_rest_on_table(const WorldModel& world);

struct ProximityModel {
  double amplitude = 100.0;  // analog counts at zero distance
  double decay = 0.005;      // meters
  double sigma = 0.0;        // counts
  double baseline = 512.0;   // counts
  double impulse = 20.0;     // one-sample spike on contact make/break
};

struct SensorRig {
  RigidTransform base_to_camera;  // camera pose in the base frame
  double points_per_m2 = 1e5;
  double depth_sigma = 0.0;  // meters, along the view ray
  ProximityModel prox;
  double sensor_rate_hz = 500.0;
  double finger_curl = 0.0;  // tip descent per meter of closing travel
};

// Camera pose positioned at `position` with +z looking at `target`.
RigidTransform look_at_pose(const Vec3& position, const Vec3& target);

// Surface-samples the table and every visible object at the configured
// density, culls points whose outward normal faces away from the camera,
// removes points occluded by any other surface, perturbs survivors along
// the view ray by Gaussian depth noise and returns the cloud in the camera
// frame (viewpoint at the origin).  Deterministic per seed.  Throws
// DegenerateInputError when the camera sits inside an object.
PointCloud render_cloud(const WorldModel& world, const SensorRig& rig,
                        std::uint64_t seed);

// Tracks penetration over successive samples to place contact impulses.
struct FingerSensorState {
  bool initialized = false;
  bool was_inside = false;
};

// One raw analog sample: baseline + amplitude * exp(-d / decay) + noise,
// where d is the distance along the sensing ray to the nearest surface
// (zero when the tip is inside one).  The sample that makes or breaks
// contact carries an extra +/- impulse.
double proximity_sample(const WorldModel& world, FingerSensorState& state,
                        const Vec3& tip, const Vec3& ray_dir,
                        const ProximityModel& model, Rng& noise);

struct ArmState {
  RigidTransform hand{Quat::identity(), {0.0, 0.0, 0.30}, "hand", "base"};
  std::array<double, 3> apertures{0.05, 0.05, 0.05};
  double max_aperture = 0.05;
  double finger_curl = 0.0;  // fully open tips sit in the hand plane; closing
                             // sweeps them down by curl * travel, claw-style
  bool closing = false;
  int attached = -1;                // index into world.objects, -1 when free
  RigidTransform grasp_offset;      // object pose in the hand frame
};

std::array<Vec3, 3> fingertip_positions(const ArmState& arm);
std::array<Vec3, 3> fingertip_ray_dirs(const ArmState& arm);

// Integrates one command over dt: straight-line motion toward Cartesian
// goals at the commanded speed with rate-bounded rotation, velocity and
// finger-aperture integration, all clamped to the limits.  An object
// attaches rigidly to the hand once `required_contacts` fingertips are
// inside it while closing, and detaches on the first opening command.
void step_arm(WorldModel& world, ArmState& arm, const Command& cmd, double dt,
              const FsmLimits& limits, int required_contacts);

}  // namespace vtg
