#include "vtg/sim_world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vtg/error.hpp"

namespace vtg {
namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 to_local_point(const RigidTransform& pose, const Vec3& p) {
  return pose.rotation.conjugate().rotate(p - pose.translation);
}

Vec3 to_local_dir(const RigidTransform& pose, const Vec3& d) {
  return pose.rotation.conjugate().rotate(d);
}

Quat quat_from_axes(const Vec3& x, const Vec3& y, const Vec3& z) {
  // Shepperd's method over the rotation matrix with columns x, y, z.
  const double m00 = x.x, m01 = y.x, m02 = z.x;
  const double m10 = x.y, m11 = y.y, m12 = z.y;
  const double m20 = x.z, m21 = y.z, m22 = z.z;
  const double trace = m00 + m11 + m22;
  Quat q;
  if (trace > 0.0) {
    const double s = std::sqrt(trace + 1.0) * 2.0;
    q = {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
  } else if (m00 > m11 && m00 > m22) {
    const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
    q = {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
  } else if (m11 > m22) {
    const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
    q = {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
  } else {
    const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
    q = {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
  }
  return q.normalized();
}

bool table_contains(const WorldModel& world, double x, double y) {
  return x >= world.table_min_x && x <= world.table_max_x &&
         y >= world.table_min_y && y <= world.table_max_y;
}

// Distance along the ray to the table rectangle, if hit from above or below.
std::optional<double> ray_table(const WorldModel& world, const Vec3& origin,
                                const Vec3& dir) {
  if (std::abs(dir.z) < 1e-15) return std::nullopt;
  const double t = (world.table_height - origin.z) / dir.z;
  if (t < 0.0) return std::nullopt;
  const double x = origin.x + t * dir.x;
  const double y = origin.y + t * dir.y;
  if (!table_contains(world, x, y)) return std::nullopt;
  return t;
}

std::optional<double> ray_box(const Vec3& he, const Vec3& o, const Vec3& d) {
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  const double os[3] = {o.x, o.y, o.z};
  const double ds[3] = {d.x, d.y, d.z};
  const double hs[3] = {he.x, he.y, he.z};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ds[i]) < 1e-15) {
      if (std::abs(os[i]) > hs[i]) return std::nullopt;
      continue;
    }
    double t0 = (-hs[i] - os[i]) / ds[i];
    double t1 = (hs[i] - os[i]) / ds[i];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return std::nullopt;
  }
  return tmin;
}

// Roots of a t^2 + b t + c = 0, smallest first; empty when complex.
std::optional<std::pair<double, double>> quadratic(double a, double b, double c) {
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0 || std::abs(a) < 1e-300) return std::nullopt;
  const double s = std::sqrt(disc);
  double r0 = (-b - s) / (2.0 * a);
  double r1 = (-b + s) / (2.0 * a);
  if (r0 > r1) std::swap(r0, r1);
  return std::make_pair(r0, r1);
}

std::optional<double> ray_cylinder(double radius, double hl, const Vec3& o,
                                   const Vec3& d) {
  double best = std::numeric_limits<double>::infinity();
  const auto side = quadratic(d.x * d.x + d.y * d.y,
                              2.0 * (o.x * d.x + o.y * d.y),
                              o.x * o.x + o.y * o.y - radius * radius);
  if (side) {
    for (double t : {side->first, side->second}) {
      if (t >= 0.0 && std::abs(o.z + t * d.z) <= hl + 1e-12) {
        best = std::min(best, t);
      }
    }
  }
  if (std::abs(d.z) > 1e-15) {
    for (double zc : {hl, -hl}) {
      const double t = (zc - o.z) / d.z;
      if (t < 0.0) continue;
      const double x = o.x + t * d.x;
      const double y = o.y + t * d.y;
      if (x * x + y * y <= radius * radius + 1e-12) best = std::min(best, t);
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

std::optional<double> ray_capsule(double radius, double hl, const Vec3& o,
                                  const Vec3& d) {
  double best = std::numeric_limits<double>::infinity();
  const auto side = quadratic(d.x * d.x + d.y * d.y,
                              2.0 * (o.x * d.x + o.y * d.y),
                              o.x * o.x + o.y * o.y - radius * radius);
  if (side) {
    for (double t : {side->first, side->second}) {
      if (t >= 0.0 && std::abs(o.z + t * d.z) <= hl) best = std::min(best, t);
    }
  }
  for (double zc : {hl, -hl}) {
    const Vec3 oc = o - Vec3{0.0, 0.0, zc};
    const auto cap =
        quadratic(d.dot(d), 2.0 * oc.dot(d), oc.dot(oc) - radius * radius);
    if (!cap) continue;
    for (double t : {cap->first, cap->second}) {
      if (t < 0.0) continue;
      const double z = o.z + t * d.z;
      if ((zc > 0.0 && z >= hl) || (zc < 0.0 && z <= -hl)) best = std::min(best, t);
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

std::optional<double> ray_ellipsoid(const Vec3& radii, const Vec3& o,
                                    const Vec3& d) {
  const Vec3 os{o.x / radii.x, o.y / radii.y, o.z / radii.z};
  const Vec3 ds{d.x / radii.x, d.y / radii.y, d.z / radii.z};
  const auto roots = quadratic(ds.dot(ds), 2.0 * os.dot(ds), os.dot(os) - 1.0);
  if (!roots) return std::nullopt;
  if (roots->first >= 0.0) return roots->first;
  if (roots->second >= 0.0) return roots->second;
  return std::nullopt;
}

double support_down(const PrimitivePart& part) {
  // Support extent of the surface in the world -z direction, local terms.
  const Vec3 ld = to_local_dir(part.pose, {0.0, 0.0, -1.0});
  switch (part.kind) {
    case ShapeKind::kBox:
      return part.half_extents.x * std::abs(ld.x) +
             part.half_extents.y * std::abs(ld.y) +
             part.half_extents.z * std::abs(ld.z);
    case ShapeKind::kCylinder:
      return part.radius * std::hypot(ld.x, ld.y) +
             part.half_length * std::abs(ld.z);
    case ShapeKind::kCapsule:
      return part.half_length * std::abs(ld.z) + part.radius;
    case ShapeKind::kEllipsoid:
      return std::sqrt(std::pow(part.half_extents.x * ld.x, 2) +
                       std::pow(part.half_extents.y * ld.y, 2) +
                       std::pow(part.half_extents.z * ld.z, 2));
    default:
      break;
  }
  return 0.0;
}

struct SurfaceSample {
  Vec3 point;
  Vec3 normal;
};

long long sample_count(double area, double density) {
  return std::llround(area * density);
}

void sample_box(const PrimitivePart& part, double density, Rng& rng,
                std::vector<SurfaceSample>& out) {
  const Vec3 he = part.half_extents;
  struct Face {
    Vec3 normal;
    Vec3 u;
    Vec3 v;
    double hu;
    double hv;
  };
  const Face faces[6] = {
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, he.y, he.z},
      {{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}, he.y, he.z},
      {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}, he.x, he.z},
      {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}, he.x, he.z},
      {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, he.x, he.y},
      {{0, 0, -1}, {1, 0, 0}, {0, 1, 0}, he.x, he.y},
  };
  const double hs[3] = {he.x, he.y, he.z};
  for (int f = 0; f < 6; ++f) {
    const Face& face = faces[f];
    const long long n = sample_count(4.0 * face.hu * face.hv, density);
    const Vec3 center = face.normal * hs[f / 2];
    for (long long i = 0; i < n; ++i) {
      const Vec3 local = center + face.u * rng.uniform(-face.hu, face.hu) +
                         face.v * rng.uniform(-face.hv, face.hv);
      out.push_back({part.pose.apply(local), part.pose.rotation.rotate(face.normal)});
    }
  }
}

void sample_cylinder(const PrimitivePart& part, double density, Rng& rng,
                     std::vector<SurfaceSample>& out) {
  const double r = part.radius;
  const double hl = part.half_length;
  const long long n_side = sample_count(2.0 * kPi * r * 2.0 * hl, density);
  for (long long i = 0; i < n_side; ++i) {
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    const Vec3 normal{std::cos(theta), std::sin(theta), 0.0};
    const Vec3 local = normal * r + Vec3{0.0, 0.0, rng.uniform(-hl, hl)};
    out.push_back({part.pose.apply(local), part.pose.rotation.rotate(normal)});
  }
  for (double zc : {hl, -hl}) {
    const long long n_cap = sample_count(kPi * r * r, density);
    const Vec3 normal{0.0, 0.0, zc > 0.0 ? 1.0 : -1.0};
    for (long long i = 0; i < n_cap; ++i) {
      const double rho = r * std::sqrt(rng.uniform());
      const double theta = rng.uniform(0.0, 2.0 * kPi);
      const Vec3 local{rho * std::cos(theta), rho * std::sin(theta), zc};
      out.push_back({part.pose.apply(local), part.pose.rotation.rotate(normal)});
    }
  }
}

void sample_capsule(const PrimitivePart& part, double density, Rng& rng,
                    std::vector<SurfaceSample>& out) {
  const double r = part.radius;
  const double hl = part.half_length;
  const long long n_side = sample_count(2.0 * kPi * r * 2.0 * hl, density);
  for (long long i = 0; i < n_side; ++i) {
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    const Vec3 normal{std::cos(theta), std::sin(theta), 0.0};
    const Vec3 local = normal * r + Vec3{0.0, 0.0, rng.uniform(-hl, hl)};
    out.push_back({part.pose.apply(local), part.pose.rotation.rotate(normal)});
  }
  const long long n_ends = sample_count(4.0 * kPi * r * r, density);
  for (long long i = 0; i < n_ends; ++i) {
    const Vec3 u = rng.unit_vector();
    const double zc = u.z >= 0.0 ? hl : -hl;
    const Vec3 local = u * r + Vec3{0.0, 0.0, zc};
    out.push_back({part.pose.apply(local), part.pose.rotation.rotate(u)});
  }
}

double ellipsoid_area(const Vec3& r) {
  // Thomsen's approximation, adequate for choosing a sample count.
  const double p = 1.6075;
  const double ap = std::pow(r.x, p);
  const double bp = std::pow(r.y, p);
  const double cp = std::pow(r.z, p);
  return 4.0 * kPi * std::pow((ap * bp + ap * cp + bp * cp) / 3.0, 1.0 / p);
}

void sample_ellipsoid(const PrimitivePart& part, double density, Rng& rng,
                      std::vector<SurfaceSample>& out) {
  const Vec3 r = part.half_extents;
  const long long n = sample_count(ellipsoid_area(r), density);
  const double gmax = std::max({r.y * r.z, r.x * r.z, r.x * r.y});
  long long accepted = 0;
  while (accepted < n) {
    const Vec3 u = rng.unit_vector();
    // Area-uniform rejection: the sphere-to-ellipsoid map stretches area
    // by g(u), so accept proportionally.
    const double g = std::sqrt(std::pow(u.x * r.y * r.z, 2) +
                               std::pow(u.y * r.x * r.z, 2) +
                               std::pow(u.z * r.x * r.y, 2));
    if (rng.uniform() * gmax > g) continue;
    ++accepted;
    const Vec3 local{r.x * u.x, r.y * u.y, r.z * u.z};
    const Vec3 normal =
        Vec3{u.x / r.x, u.y / r.y, u.z / r.z}.normalized();
    out.push_back({part.pose.apply(local), part.pose.rotation.rotate(normal)});
  }
}

void sample_part(const PrimitivePart& part, double density, Rng& rng,
                 std::vector<SurfaceSample>& out) {
  switch (part.kind) {
    case ShapeKind::kBox: sample_box(part, density, rng, out); break;
    case ShapeKind::kCylinder: sample_cylinder(part, density, rng, out); break;
    case ShapeKind::kCapsule: sample_capsule(part, density, rng, out); break;
    case ShapeKind::kEllipsoid: sample_ellipsoid(part, density, rng, out); break;
    default: break;
  }
}

}  // namespace

std::vector<PrimitivePart> object_parts(const SimObject& object) {
  std::vector<PrimitivePart> parts;
  const Shape& s = object.shape;
  switch (s.kind) {
    case ShapeKind::kBox:
    case ShapeKind::kCylinder:
    case ShapeKind::kCapsule:
    case ShapeKind::kEllipsoid: {
      PrimitivePart part;
      part.kind = s.kind;
      part.half_extents = s.half_extents;
      part.radius = s.radius;
      part.half_length = s.half_length;
      part.pose = object.pose;
      parts.push_back(part);
      break;
    }
    case ShapeKind::kSpoon: {
      // Handle capsule lying along local +x: rotate the capsule's z axis
      // onto x.
      PrimitivePart handle;
      handle.kind = ShapeKind::kCapsule;
      handle.radius = s.radius;
      handle.half_length = s.half_length;
      RigidTransform local{Quat::from_axis_angle({0, 1, 0}, kPi / 2.0),
                           {0.0, 0.0, 0.0},
                           object.pose.from_frame + "/handle",
                           object.pose.from_frame};
      handle.pose = compose(object.pose, local);
      parts.push_back(handle);

      // Shallow bowl past the +x end, bottom flush with the handle bottom.
      PrimitivePart bowl;
      bowl.kind = ShapeKind::kEllipsoid;
      bowl.half_extents = s.bowl_radii;
      RigidTransform bowl_local{
          Quat::identity(),
          {s.half_length + 0.6 * s.bowl_radii.x, 0.0, s.bowl_radii.z - s.radius},
          object.pose.from_frame + "/bowl",
          object.pose.from_frame};
      bowl.pose = compose(object.pose, bowl_local);
      parts.push_back(bowl);
      break;
    }
  }
  return parts;
}

bool inside_part(const PrimitivePart& part, const Vec3& p) {
  const Vec3 q = to_local_point(part.pose, p);
  switch (part.kind) {
    case ShapeKind::kBox:
      return std::abs(q.x) <= part.half_extents.x &&
             std::abs(q.y) <= part.half_extents.y &&
             std::abs(q.z) <= part.half_extents.z;
    case ShapeKind::kCylinder:
      return std::hypot(q.x, q.y) <= part.radius &&
             std::abs(q.z) <= part.half_length;
    case ShapeKind::kCapsule: {
      const double zc = std::clamp(q.z, -part.half_length, part.half_length);
      return distance(q, {0.0, 0.0, zc}) <= part.radius;
    }
    case ShapeKind::kEllipsoid: {
      const Vec3 s{q.x / part.half_extents.x, q.y / part.half_extents.y,
                   q.z / part.half_extents.z};
      return s.dot(s) <= 1.0;
    }
    default:
      break;
  }
  return false;
}

bool inside_any_object(const WorldModel& world, const Vec3& p) {
  for (const SimObject& obj : world.objects) {
    for (const PrimitivePart& part : object_parts(obj)) {
      if (inside_part(part, p)) return true;
    }
  }
  return false;
}

std::optional<double> ray_part(const PrimitivePart& part, const Vec3& origin,
                               const Vec3& dir) {
  if (inside_part(part, origin)) return 0.0;
  const Vec3 o = to_local_point(part.pose, origin);
  const Vec3 d = to_local_dir(part.pose, dir);
  switch (part.kind) {
    case ShapeKind::kBox: {
      auto t = ray_box(part.half_extents, o, d);
      if (t && *t >= 0.0) return t;
      return std::nullopt;
    }
    case ShapeKind::kCylinder:
      return ray_cylinder(part.radius, part.half_length, o, d);
    case ShapeKind::kCapsule:
      return ray_capsule(part.radius, part.half_length, o, d);
    case ShapeKind::kEllipsoid:
      return ray_ellipsoid(part.half_extents, o, d);
    default:
      break;
  }
  return std::nullopt;
}

double lowest_surface_z(const PrimitivePart& part) {
  return part.pose.translation.z - support_down(part);
}

void check_objects_rest_on_table(const WorldModel& world) {
  for (const SimObject& obj : world.objects) {
    double low = std::numeric_limits<double>::infinity();
    for (const PrimitivePart& part : object_parts(obj)) {
      low = std::min(low, lowest_surface_z(part));
    }
    if (std::abs(low - world.table_height) > 1e-3) {
      throw ConfigError("object '" + obj.label +
                        "' does not rest on the table (lowest point " +
                        std::to_string(low) + ")");
    }
  }
}

RigidTransform look_at_pose(const Vec3& position, const Vec3& target) {
  const Vec3 gaze = target - position;
  if (gaze.norm() < 1e-12) {
    throw DegenerateInputError("camera target coincides with its position");
  }
  const Vec3 z = gaze.normalized();
  const Vec3 ref = std::abs(z.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 x = (ref - z * ref.dot(z)).normalized();
  const Vec3 y = z.cross(x);
  return {quat_from_axes(x, y, z), position, "camera", "base"};
}

PointCloud render_cloud(const WorldModel& world, const SensorRig& rig,
                        std::uint64_t seed) {
  const Vec3 cam = rig.base_to_camera.translation;

  std::vector<PrimitivePart> parts;
  std::vector<Vec3> part_colors;
  for (const SimObject& obj : world.objects) {
    for (const PrimitivePart& part : object_parts(obj)) {
      parts.push_back(part);
      part_colors.push_back(obj.color);
    }
  }
  for (const PrimitivePart& part : parts) {
    if (inside_part(part, cam)) {
      throw DegenerateInputError("camera is inside an object");
    }
  }

  Rng rng(seed);
  std::vector<SurfaceSample> samples;
  std::vector<Vec3> sample_colors;

  const double table_area = (world.table_max_x - world.table_min_x) *
                            (world.table_max_y - world.table_min_y);
  const long long n_table = sample_count(table_area, rig.points_per_m2);
  for (long long i = 0; i < n_table; ++i) {
    const Vec3 p{rng.uniform(world.table_min_x, world.table_max_x),
                 rng.uniform(world.table_min_y, world.table_max_y),
                 world.table_height};
    samples.push_back({p, {0.0, 0.0, 1.0}});
    sample_colors.push_back(world.table_color);
  }
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::size_t before = samples.size();
    sample_part(parts[k], rig.points_per_m2, rng, samples);
    sample_colors.resize(samples.size(), part_colors[k]);
    (void)before;
  }

  PointCloud cloud;
  cloud.viewpoint = {0.0, 0.0, 0.0};  // camera origin, camera frame
  const RigidTransform cam_from_base = inverse(rig.base_to_camera);

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SurfaceSample& s = samples[i];
    const Vec3 to_cam = cam - s.point;
    const double range = to_cam.norm();
    if (range < 1e-9) continue;
    if (s.normal.dot(to_cam) <= 1e-12) continue;  // back face

    const Vec3 dir = (s.point - cam) / range;
    bool occluded = false;
    for (const PrimitivePart& part : parts) {
      const auto t = ray_part(part, cam, dir);
      if (t && *t < range - 1e-7) {
        occluded = true;
        break;
      }
    }
    if (!occluded) {
      const auto t = ray_table(world, cam, dir);
      if (t && *t < range - 1e-7) occluded = true;
    }
    if (occluded) continue;

    const Vec3 p = s.point + dir * (rig.depth_sigma * rng.gaussian());
    cloud.points.push_back(cam_from_base.apply(p));
    cloud.colors.push_back(sample_colors[i]);
  }
  return cloud;
}

double proximity_sample(const WorldModel& world, FingerSensorState& state,
                        const Vec3& tip, const Vec3& ray_dir,
                        const ProximityModel& model, Rng& noise) {
  const bool on_table =
      tip.z <= world.table_height && table_contains(world, tip.x, tip.y);
  const bool inside = on_table || inside_any_object(world, tip);

  double d = std::numeric_limits<double>::infinity();
  if (inside) {
    d = 0.0;
  } else {
    for (const SimObject& obj : world.objects) {
      for (const PrimitivePart& part : object_parts(obj)) {
        const auto t = ray_part(part, tip, ray_dir);
        if (t) d = std::min(d, *t);
      }
    }
    const auto t = ray_table(world, tip, ray_dir);
    if (t) d = std::min(d, *t);
  }

  double raw = model.baseline;
  if (std::isfinite(d)) raw += model.amplitude * std::exp(-d / model.decay);
  if (state.initialized && inside != state.was_inside) {
    raw += inside ? model.impulse : -model.impulse;
  }
  state.initialized = true;
  state.was_inside = inside;
  return raw + model.sigma * noise.gaussian();
}

std::array<Vec3, 3> fingertip_positions(const ArmState& arm) {
  std::array<Vec3, 3> tips;
  for (int i = 0; i < 3; ++i) {
    const double theta = 2.0 * kPi * i / 3.0;
    const Vec3 local{std::cos(theta) * arm.apertures[i],
                     std::sin(theta) * arm.apertures[i],
                     -arm.finger_curl * (arm.max_aperture - arm.apertures[i])};
    tips[i] = arm.hand.apply(local);
  }
  return tips;
}

std::array<Vec3, 3> fingertip_ray_dirs(const ArmState& arm) {
  std::array<Vec3, 3> dirs;
  const double n = std::sqrt(1.0 + arm.finger_curl * arm.finger_curl);
  for (int i = 0; i < 3; ++i) {
    const double theta = 2.0 * kPi * i / 3.0;
    dirs[i] = arm.hand.rotation.rotate({-std::cos(theta) / n,
                                        -std::sin(theta) / n,
                                        -arm.finger_curl / n});
  }
  return dirs;
}

void step_arm(WorldModel& world, ArmState& arm, const Command& cmd, double dt,
              const FsmLimits& limits, int required_contacts) {
  if (const auto* goal = std::get_if<CartesianGoal>(&cmd)) {
    const double speed = std::clamp(goal->max_speed, 0.0, limits.max_linear_speed);
    const Vec3 delta = goal->target.translation - arm.hand.translation;
    const double dist = delta.norm();
    const double step = std::min(speed * dt, dist);
    if (dist > 0.0) arm.hand.translation += delta * (step / dist);
    const double angle = arm.hand.rotation.angle_to(goal->target.rotation);
    if (angle > 1e-12) {
      const double u = std::min(1.0, limits.max_angular_speed * dt / angle);
      arm.hand.rotation = slerp(arm.hand.rotation, goal->target.rotation, u);
    }
  } else if (const auto* vel = std::get_if<VelocityCommand>(&cmd)) {
    Vec3 v = vel->linear;
    const double n = v.norm();
    if (n > limits.max_linear_speed) v *= limits.max_linear_speed / n;
    arm.hand.translation += v * dt;
  } else if (const auto* fin = std::get_if<FingerCommand>(&cmd)) {
    const double rate =
        std::clamp(fin->rate, -limits.max_finger_rate, limits.max_finger_rate);
    for (int i = 0; i < 3; ++i) {
      if (!fin->active[i]) continue;
      arm.apertures[i] =
          std::clamp(arm.apertures[i] + rate * dt, 0.0, arm.max_aperture);
    }
    if (rate < 0.0) arm.closing = true;
    if (rate > 0.0) {
      arm.closing = false;
      arm.attached = -1;  // the object stays where it was released
    }
  }

  if (arm.attached >= 0) {
    world.objects[arm.attached].pose = compose(arm.hand, arm.grasp_offset);
  } else if (arm.closing) {
    const auto tips = fingertip_positions(arm);
    for (std::size_t o = 0; o < world.objects.size(); ++o) {
      const auto parts = object_parts(world.objects[o]);
      int contacts = 0;
      for (const Vec3& tip : tips) {
        for (const PrimitivePart& part : parts) {
          if (inside_part(part, tip)) {
            ++contacts;
            break;
          }
        }
      }
      if (contacts >= required_contacts) {
        arm.attached = static_cast<int>(o);
        arm.grasp_offset = compose(inverse(arm.hand), world.objects[o].pose);
        world.objects[o].pose = compose(arm.hand, arm.grasp_offset);
        break;
      }
    }
  }
}

}  // namespace vtg
