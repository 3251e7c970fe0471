#pragma once

// Tabletop segmentation pipeline: per-point normals, RANSAC plane removal,
// Euclidean clustering and hue-based sub-segmentation.  All outputs are
// deterministic for a fixed input and seed; index sets are sorted ascending
// and cluster lists are ordered by (size desc, smallest index asc).

#include <cstdint>
#include <vector>

#include "vtg/geometry.hpp"

namespace vtg {

struct NormalField {
  std::vector<Vec3> normals;            // unit vectors; zero when degenerate
  std::vector<std::uint8_t> degenerate; // 1 = too few neighbors / rank < 2
  std::size_t size() const { return normals.size(); }
};

// Plane {p : normal . p == offset}, |normal| == 1.
struct PlaneModel {
  Vec3 normal{0, 0, 1};
  double offset = 0.0;
  double distance_to(const Vec3& p) const {
    return std::abs(normal.dot(p) - offset);
  }
};

struct Cluster {
  std::vector<int> indices;  // sorted ascending, unique
  std::size_t size() const { return indices.size(); }
};

struct PlaneFit {
  PlaneModel model;
  Cluster inliers;
};

// PCA normals over a fixed-radius neighborhood, oriented toward the cloud
// viewpoint.  Points with fewer than 3 neighbors (the point itself counts)
// or a rank-deficient neighborhood are flagged degenerate.
NormalField estimate_normals(const PointCloud& cloud, double radius);

// Largest-consensus plane from random 3-point hypotheses, refit by least
// squares on the winning consensus set.  The returned inliers are exactly
// the points within dist_threshold of the *refit* model.  The normal is
// oriented toward the cloud viewpoint.
PlaneFit segment_plane_ransac(const PointCloud& cloud, double dist_threshold,
                              int max_iters, std::uint64_t seed);

// Copy of the cloud without the given indices (colors follow points).
PointCloud remove_indices(const PointCloud& cloud, const Cluster& drop);

// Copy of the cloud keeping only the given indices.
PointCloud extract(const PointCloud& cloud, const Cluster& keep);

Vec3 centroid(const PointCloud& cloud);
Vec3 centroid(const PointCloud& cloud, const Cluster& cluster);

// Connected components linking points with distance <= tolerance; components
// outside [min_size, max_size] are discarded.
std::vector<Cluster> euclidean_cluster(const PointCloud& cloud, double tolerance,
                                       std::size_t min_size,
                                       std::size_t max_size);

// Splits one cluster into sub-clusters connected both spatially
// (distance <= spatial_tolerance) and chromatically (circular hue difference
// <= hue_tolerance_deg).  Requires a colored cloud.
std::vector<Cluster> color_split(const PointCloud& cloud, const Cluster& cluster,
                                 double hue_tolerance_deg, std::size_t min_size,
                                 double spatial_tolerance);

// Hue in [0, 360) from an RGB triple in [0, 1]; gray maps to 0.
double hue_degrees(const Vec3& rgb);
// Circular hue difference in [0, 180].
double hue_difference_deg(double a_deg, double b_deg);

}  // namespace vtg
