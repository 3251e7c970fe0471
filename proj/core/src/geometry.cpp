#include "vtg/geometry.hpp"

#include <algorithm>
#include <queue>

namespace vtg {

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n <= 0.0 || !std::isfinite(n)) {
    throw DegenerateInputError("cannot normalize zero-length vector");
  }
  return *this / n;
}

double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

double squared_distance(const Vec3& a, const Vec3& b) {
  return (a - b).squared_norm();
}

Quat Quat::from_axis_angle(const Vec3& axis, double angle_rad) {
  const Vec3 u = axis.normalized();
  const double h = 0.5 * angle_rad;
  const double s = std::sin(h);
  return {std::cos(h), u.x * s, u.y * s, u.z * s};
}

Quat Quat::normalized() const {
  const double n = norm();
  if (n <= 0.0 || !std::isfinite(n)) {
    throw DegenerateInputError("cannot normalize zero quaternion");
  }
  return {w / n, x / n, y / n, z / n};
}

Quat Quat::operator*(const Quat& o) const {
  return {w * o.w - x * o.x - y * o.y - z * o.z,
          w * o.x + x * o.w + y * o.z - z * o.y,
          w * o.y - x * o.z + y * o.w + z * o.x,
          w * o.z + x * o.y - y * o.x + z * o.w};
}

Vec3 Quat::rotate(const Vec3& v) const {
  // v' = v + 2 q_v x (q_v x v + w v)
  const Vec3 qv{x, y, z};
  const Vec3 t = qv.cross(v) * 2.0;
  return v + t * w + qv.cross(t);
}

double Quat::angle_to(const Quat& o) const {
  const Quat d = conjugate() * o;
  const double c = std::clamp(std::abs(d.w) / d.norm(), 0.0, 1.0);
  return 2.0 * std::acos(c);
}

Quat slerp(const Quat& a, const Quat& b, double u) {
  Quat from = a.normalized();
  Quat to = b.normalized();
  double dot = from.w * to.w + from.x * to.x + from.y * to.y + from.z * to.z;
  if (dot < 0.0) {
    to = {-to.w, -to.x, -to.y, -to.z};
    dot = -dot;
  }
  u = std::clamp(u, 0.0, 1.0);
  if (dot > 1.0 - 1e-10) {
    // Nearly parallel: linear interpolation avoids a vanishing denominator.
    Quat q{from.w + (to.w - from.w) * u, from.x + (to.x - from.x) * u,
           from.y + (to.y - from.y) * u, from.z + (to.z - from.z) * u};
    return q.normalized();
  }
  const double theta = std::acos(std::clamp(dot, -1.0, 1.0));
  const double s = std::sin(theta);
  const double wa = std::sin((1.0 - u) * theta) / s;
  const double wb = std::sin(u * theta) / s;
  Quat q{wa * from.w + wb * to.w, wa * from.x + wb * to.x,
         wa * from.y + wb * to.y, wa * from.z + wb * to.z};
  return q.normalized();
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  if (a.from_frame != b.to_frame) {
    throw FrameMismatchError("cannot compose: inner frame '" + a.from_frame +
                             "' does not match '" + b.to_frame + "'");
  }
  RigidTransform out;
  out.rotation = (a.rotation * b.rotation).normalized();
  out.translation = a.rotation.rotate(b.translation) + a.translation;
  out.from_frame = b.from_frame;
  out.to_frame = a.to_frame;
  return out;
}

RigidTransform inverse(const RigidTransform& t) {
  RigidTransform out;
  out.rotation = t.rotation.conjugate().normalized();
  out.translation = -out.rotation.rotate(t.translation);
  out.from_frame = t.to_frame;
  out.to_frame = t.from_frame;
  return out;
}

PointCloud transform_cloud(const RigidTransform& t, const PointCloud& cloud) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) out.points.push_back(t.apply(p));
  out.colors = cloud.colors;
  out.viewpoint = t.apply(cloud.viewpoint);
  return out;
}

namespace {
constexpr int kLeafSize = 16;

double axis_value(const Vec3& v, int axis) {
  return axis == 0 ? v.x : (axis == 1 ? v.y : v.z);
}
}  // namespace

NeighborIndex::NeighborIndex(const PointCloud& cloud) : pts_(cloud.points) {
  order_.resize(pts_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = int(i);
  if (!pts_.empty()) root_ = build(0, int(pts_.size()));
}

int NeighborIndex::build(int begin, int end) {
  Node n;
  n.begin = begin;
  n.end = end;
  n.box_min = Vec3{1e300, 1e300, 1e300};
  n.box_max = Vec3{-1e300, -1e300, -1e300};
  for (int i = begin; i < end; ++i) {
    const Vec3& p = pts_[order_[i]];
    n.box_min.x = std::min(n.box_min.x, p.x);
    n.box_min.y = std::min(n.box_min.y, p.y);
    n.box_min.z = std::min(n.box_min.z, p.z);
    n.box_max.x = std::max(n.box_max.x, p.x);
    n.box_max.y = std::max(n.box_max.y, p.y);
    n.box_max.z = std::max(n.box_max.z, p.z);
  }
  const int id = int(nodes_.size());
  nodes_.push_back(n);
  if (end - begin <= kLeafSize) return id;

  const Vec3 extent = n.box_max - n.box_min;
  int axis = 0;
  if (extent.y > extent.x) axis = 1;
  if (extent.z > axis_value(extent, axis)) axis = 2;
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     const double va = axis_value(pts_[a], axis);
                     const double vb = axis_value(pts_[b], axis);
                     return va < vb || (va == vb && a < b);
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double NeighborIndex::box_squared_distance(const Node& n, const Vec3& q) const {
  const double dx = std::max({n.box_min.x - q.x, 0.0, q.x - n.box_max.x});
  const double dy = std::max({n.box_min.y - q.y, 0.0, q.y - n.box_max.y});
  const double dz = std::max({n.box_min.z - q.z, 0.0, q.z - n.box_max.z});
  return dx * dx + dy * dy + dz * dz;
}

std::vector<int> NeighborIndex::radius_search(const Vec3& query,
                                              double radius) const {
  if (radius < 0.0 || !std::isfinite(radius)) {
    throw DegenerateInputError("radius_search requires a finite radius >= 0");
  }
  std::vector<int> found;
  if (root_ < 0) return found;
  const double r2 = radius * radius;

  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (box_squared_distance(n, query) > r2) continue;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const int idx = order_[i];
        if (squared_distance(pts_[idx], query) <= r2) found.push_back(idx);
      }
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  std::sort(found.begin(), found.end(), [&](int a, int b) {
    const double da = squared_distance(pts_[a], query);
    const double db = squared_distance(pts_[b], query);
    return da < db || (da == db && a < b);
  });
  return found;
}

std::vector<int> NeighborIndex::knn(const Vec3& query, int k) const {
  std::vector<int> found;
  if (k <= 0 || root_ < 0) return found;
  const int want = std::min<int>(k, int(pts_.size()));

  using Entry = std::pair<double, int>;  // (squared distance, index)
  const auto worse = [](const Entry& a, const Entry& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  };
  // Max-heap on (distance, index) so the worst kept candidate is on top.
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (int(heap.size()) == want &&
        box_squared_distance(n, query) > heap.top().first) {
      continue;
    }
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const int idx = order_[i];
        const Entry e{squared_distance(pts_[idx], query), idx};
        if (int(heap.size()) < want) {
          heap.push(e);
        } else if (worse(e, heap.top())) {
          heap.pop();
          heap.push(e);
        }
      }
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }

  found.resize(heap.size());
  for (int i = int(heap.size()) - 1; !heap.empty(); --i) {
    found[i] = heap.top().second;
    heap.pop();
  }
  return found;
}

}  // namespace vtg
