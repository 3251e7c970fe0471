#include "vtg/perception.hpp"

#include <Eigen/Dense>

#include <algorithm>

#include "vtg/rng.hpp"

namespace vtg {
namespace {

Eigen::Matrix3d scatter_matrix(const std::vector<Vec3>& pts,
                               const std::vector<int>& idx, const Vec3& mean) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int i : idx) {
    const Vec3 d = pts[std::size_t(i)] - mean;
    const Eigen::Vector3d e(d.x, d.y, d.z);
    m += e * e.transpose();
  }
  return m;
}

Vec3 mean_of(const std::vector<Vec3>& pts, const std::vector<int>& idx) {
  Vec3 sum;
  for (int i : idx) sum += pts[std::size_t(i)];
  return sum / double(idx.size());
}

void check_cluster_indices(const PointCloud& cloud, const Cluster& cluster) {
  int prev = -1;
  for (int i : cluster.indices) {
    if (i <= prev || i < 0 || std::size_t(i) >= cloud.size()) {
      throw DegenerateInputError(
          "cluster indices must be sorted, unique and in range");
    }
    prev = i;
  }
}

}  // namespace

NormalField estimate_normals(const PointCloud& cloud, double radius) {
  if (radius <= 0.0) {
    throw DegenerateInputError("normal estimation radius must be positive");
  }
  NormalField field;
  field.normals.resize(cloud.size());
  field.degenerate.assign(cloud.size(), 0);
  if (cloud.empty()) return field;

  const NeighborIndex index(cloud);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::vector<int> nbrs = index.radius_search(cloud.points[i], radius);
    if (nbrs.size() < 3) {
      field.degenerate[i] = 1;
      continue;
    }
    const Vec3 mean = mean_of(cloud.points, nbrs);
    const Eigen::Matrix3d cov = scatter_matrix(cloud.points, nbrs, mean);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d evals = eig.eigenvalues();  // ascending
    if (evals(1) <= evals(2) * 1e-12) {
      // Collinear neighborhood: the normal direction is not unique.
      field.degenerate[i] = 1;
      continue;
    }
    const Eigen::Vector3d v = eig.eigenvectors().col(0);
    Vec3 n{v(0), v(1), v(2)};
    if (n.dot(cloud.viewpoint - cloud.points[i]) < 0.0) n = -n;
    field.normals[i] = n;
  }
  return field;
}

PlaneFit segment_plane_ransac(const PointCloud& cloud, double dist_threshold,
                              int max_iters, std::uint64_t seed) {
  const int n = int(cloud.size());
  if (n < 3) throw DegenerateInputError("plane fit needs at least 3 points");
  if (dist_threshold <= 0.0 || max_iters < 1) {
    throw DegenerateInputError("plane fit needs threshold > 0 and iters >= 1");
  }

  Rng rng(seed);
  int best_count = -1;
  Vec3 best_normal;
  double best_offset = 0.0;

  for (int iter = 0; iter < max_iters; ++iter) {
    const int a = int(rng.uniform_int(0, n - 1));
    int b = int(rng.uniform_int(0, n - 1));
    int c = int(rng.uniform_int(0, n - 1));
    if (a == b || a == c || b == c) continue;

    const Vec3& pa = cloud.points[std::size_t(a)];
    const Vec3 cross = (cloud.points[std::size_t(b)] - pa)
                           .cross(cloud.points[std::size_t(c)] - pa);
    const double norm = cross.norm();
    if (norm < 1e-12) continue;  // collinear sample
    const Vec3 normal = cross / norm;
    const double offset = normal.dot(pa);

    int count = 0;
    for (const Vec3& p : cloud.points) {
      if (std::abs(normal.dot(p) - offset) <= dist_threshold) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_normal = normal;
      best_offset = offset;
    }
  }
  if (best_count < 3) {
    throw DegenerateInputError("no plane hypothesis reached 3 inliers");
  }

  // Consensus set of the winning hypothesis, then a least-squares refit.
  std::vector<int> consensus;
  for (int i = 0; i < n; ++i) {
    if (std::abs(best_normal.dot(cloud.points[std::size_t(i)]) - best_offset) <=
        dist_threshold) {
      consensus.push_back(i);
    }
  }
  const Vec3 mean = mean_of(cloud.points, consensus);
  const Eigen::Matrix3d cov = scatter_matrix(cloud.points, consensus, mean);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d v = eig.eigenvectors().col(0);

  PlaneFit fit;
  fit.model.normal = Vec3{v(0), v(1), v(2)}.normalized();
  fit.model.offset = fit.model.normal.dot(mean);
  if (fit.model.normal.dot(cloud.viewpoint - mean) < 0.0) {
    fit.model.normal = -fit.model.normal;
    fit.model.offset = -fit.model.offset;
  }

  for (int i = 0; i < n; ++i) {
    if (fit.model.distance_to(cloud.points[std::size_t(i)]) <= dist_threshold) {
      fit.inliers.indices.push_back(i);
    }
  }
  return fit;
}

PointCloud remove_indices(const PointCloud& cloud, const Cluster& drop) {
  check_cluster_indices(cloud, drop);
  PointCloud out;
  out.viewpoint = cloud.viewpoint;
  out.points.reserve(cloud.size() - drop.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (next < drop.size() && drop.indices[next] == int(i)) {
      ++next;
      continue;
    }
    out.points.push_back(cloud.points[i]);
    if (cloud.has_colors()) out.colors.push_back(cloud.colors[i]);
  }
  return out;
}

PointCloud extract(const PointCloud& cloud, const Cluster& keep) {
  check_cluster_indices(cloud, keep);
  PointCloud out;
  out.viewpoint = cloud.viewpoint;
  out.points.reserve(keep.size());
  for (int i : keep.indices) {
    out.points.push_back(cloud.points[std::size_t(i)]);
    if (cloud.has_colors()) out.colors.push_back(cloud.colors[std::size_t(i)]);
  }
  return out;
}

Vec3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw DegenerateInputError("centroid of empty cloud");
  Vec3 sum;
  for (const Vec3& p : cloud.points) sum += p;
  return sum / double(cloud.size());
}

Vec3 centroid(const PointCloud& cloud, const Cluster& cluster) {
  if (cluster.size() == 0) throw DegenerateInputError("centroid of empty cluster");
  check_cluster_indices(cloud, cluster);
  Vec3 sum;
  for (int i : cluster.indices) sum += cloud.points[std::size_t(i)];
  return sum / double(cluster.size());
}

namespace {

void order_clusters(std::vector<Cluster>& clusters) {
  for (Cluster& c : clusters) std::sort(c.indices.begin(), c.indices.end());
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return a.size() > b.size() ||
           (a.size() == b.size() && a.indices[0] < b.indices[0]);
  });
}

}  // namespace

std::vector<Cluster> euclidean_cluster(const PointCloud& cloud, double tolerance,
                                       std::size_t min_size,
                                       std::size_t max_size) {
  if (tolerance <= 0.0) {
    throw DegenerateInputError("cluster tolerance must be positive");
  }
  std::vector<Cluster> out;
  if (cloud.empty()) return out;

  const NeighborIndex index(cloud);
  std::vector<std::uint8_t> visited(cloud.size(), 0);
  for (std::size_t start = 0; start < cloud.size(); ++start) {
    if (visited[start]) continue;
    Cluster comp;
    std::vector<int> frontier{int(start)};
    visited[start] = 1;
    while (!frontier.empty()) {
      const int cur = frontier.back();
      frontier.pop_back();
      comp.indices.push_back(cur);
      for (int nb : index.radius_search(cloud.points[std::size_t(cur)], tolerance)) {
        if (!visited[std::size_t(nb)]) {
          visited[std::size_t(nb)] = 1;
          frontier.push_back(nb);
        }
      }
    }
    if (comp.size() >= min_size && comp.size() <= max_size) {
      out.push_back(std::move(comp));
    }
  }
  order_clusters(out);
  return out;
}

double hue_degrees(const Vec3& rgb) {
  const double mx = std::max({rgb.x, rgb.y, rgb.z});
  const double mn = std::min({rgb.x, rgb.y, rgb.z});
  const double c = mx - mn;
  if (c <= 0.0) return 0.0;
  double h = 0.0;
  if (mx == rgb.x) {
    h = std::fmod((rgb.y - rgb.z) / c, 6.0);
  } else if (mx == rgb.y) {
    h = (rgb.z - rgb.x) / c + 2.0;
  } else {
    h = (rgb.x - rgb.y) / c + 4.0;
  }
  h *= 60.0;
  if (h < 0.0) h += 360.0;
  return h;
}

double hue_difference_deg(double a_deg, double b_deg) {
  double d = std::fmod(std::abs(a_deg - b_deg), 360.0);
  if (d > 180.0) d = 360.0 - d;
  return d;
}

std::vector<Cluster> color_split(const PointCloud& cloud, const Cluster& cluster,
                                 double hue_tolerance_deg, std::size_t min_size,
                                 double spatial_tolerance) {
  if (!cloud.has_colors()) {
    throw DegenerateInputError("color_split requires a colored cloud");
  }
  check_cluster_indices(cloud, cluster);
  if (spatial_tolerance <= 0.0) {
    throw DegenerateInputError("spatial tolerance must be positive");
  }

  const PointCloud sub = extract(cloud, cluster);
  std::vector<double> hue(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) hue[i] = hue_degrees(sub.colors[i]);

  const NeighborIndex index(sub);
  std::vector<std::uint8_t> visited(sub.size(), 0);
  std::vector<Cluster> out;
  for (std::size_t start = 0; start < sub.size(); ++start) {
    if (visited[start]) continue;
    Cluster comp;
    std::vector<int> frontier{int(start)};
    visited[start] = 1;
    while (!frontier.empty()) {
      const int cur = frontier.back();
      frontier.pop_back();
      comp.indices.push_back(cluster.indices[std::size_t(cur)]);
      for (int nb : index.radius_search(sub.points[std::size_t(cur)],
                                        spatial_tolerance)) {
        if (visited[std::size_t(nb)]) continue;
        if (hue_difference_deg(hue[std::size_t(cur)], hue[std::size_t(nb)]) >
            hue_tolerance_deg) {
          continue;
        }
        visited[std::size_t(nb)] = 1;
        frontier.push_back(nb);
      }
    }
    if (comp.size() >= min_size) out.push_back(std::move(comp));
  }
  order_clusters(out);
  return out;
}

}  // namespace vtg
