#pragma once

// Basic 3D types shared by every stage of the pipeline: vectors, unit
// quaternions, frame-labelled rigid transforms, point clouds and an exact
// nearest-neighbor index.
//
// Frame conventions:
//  - all coordinates are meters in right-handed frames;
//  - the camera frame has +z along the optical axis, +x right, +y down;
//  - a transform named a_to_b (e.g. base_to_camera) maps points expressed
//    in frame b into frame a, i.e. it is the pose of b with respect to a.
//    Its from_frame is "b" and its to_frame is "a".

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "vtg/error.hpp"

namespace vtg {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double px, double py, double pz) : x(px), y(py), z(pz) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
  Vec3 normalized() const;
  bool is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

double distance(const Vec3& a, const Vec3& b);
double squared_distance(const Vec3& a, const Vec3& b);

// Unit quaternion, scalar-first.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quat() = default;
  constexpr Quat(double qw, double qx, double qy, double qz)
      : w(qw), x(qx), y(qy), z(qz) {}

  static Quat identity() { return {}; }
  static Quat from_axis_angle(const Vec3& axis, double angle_rad);

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quat normalized() const;
  Quat conjugate() const { return {w, -x, -y, -z}; }
  Quat operator*(const Quat& o) const;
  Vec3 rotate(const Vec3& v) const;

  // Smallest rotation angle taking this orientation to `o`, in radians.
  double angle_to(const Quat& o) const;
};

// Interpolates along the shorter great-circle arc; u in [0, 1].
Quat slerp(const Quat& a, const Quat& b, double u);

// Rigid transform with mandatory frame labels.  apply() maps coordinates
// expressed in from_frame into to_frame.
struct RigidTransform {
  Quat rotation;
  Vec3 translation;
  std::string from_frame;
  std::string to_frame;

  static RigidTransform identity(const std::string& frame) {
    return {Quat::identity(), Vec3{}, frame, frame};
  }

  Vec3 apply(const Vec3& p) const { return rotation.rotate(p) + translation; }
};

// compose(a, b): apply b first, then a.  Requires a.from_frame == b.to_frame;
// the result maps b.from_frame into a.to_frame.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);

struct PointCloud {
  std::vector<Vec3> points;
  // Either empty or one RGB triple in [0, 1] per point.
  std::vector<Vec3> colors;
  // Sensor origin the cloud was captured from, in the cloud's own frame.
  Vec3 viewpoint;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_colors() const { return !colors.empty(); }
};

// Applies t to every point and to the viewpoint; colors are carried over.
PointCloud transform_cloud(const RigidTransform& t, const PointCloud& cloud);

// Exact spatial index over a fixed cloud (kd-tree).  Both query types return
// indices ordered by ascending distance, ties broken by ascending index, and
// agree exactly with a brute-force scan.
class NeighborIndex {
 public:
  explicit NeighborIndex(const PointCloud& cloud);

  // All indices with distance(query, p) <= radius.
  std::vector<int> radius_search(const Vec3& query, double radius) const;
  // The k nearest indices (all of them when k exceeds the cloud size).
  std::vector<int> knn(const Vec3& query, int k) const;

  std::size_t size() const { return pts_.size(); }

 private:
  struct Node {
    int begin = 0;
    int end = 0;     // leaf covers order_[begin, end)
    int left = -1;   // children; -1 for leaves
    int right = -1;
    Vec3 box_min;
    Vec3 box_max;
  };

  int build(int begin, int end);
  double box_squared_distance(const Node& n, const Vec3& q) const;

  std::vector<Vec3> pts_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace vtg
