#pragma once

// Descriptor extraction and template matching.
//
// Two descriptor kinds are produced from a cloud with estimated normals:
//  - local (352 bins): the support sphere around a keypoint is partitioned in
//    a repeatable local frame into 8 azimuth x 2 elevation x 2 radial = 32
//    sectors; each sector holds an 11-bin soft histogram of the cosine of the
//    angle between a point's normal and the keypoint frame's z axis.
//  - global (308 bins): three 45-bin histograms of angular features between
//    each point's normal and a centroid-anchored frame, a 45-bin histogram of
//    centroid distances normalized by the cluster radius, and a 128-bin
//    histogram of the cosine between normals and the centroid-to-viewpoint
//    direction.
//
// All descriptors are non-negative and L1-normalized (all-zero when no point
// contributed).  Similarity is histogram intersection sum(min(a_i, b_i)) in
// [0, 1]; distance is one minus that.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vtg/geometry.hpp"
#include "vtg/params.hpp"
#include "vtg/perception.hpp"

namespace vtg {

// Repeatable orthonormal right-handed frame attached to a point.
struct LocalFrame {
  Vec3 origin;
  Vec3 x, y, z;  // z is the normal-like axis (smallest spread direction)
};

enum class DescriptorKind { kLocal, kGlobal };

struct Descriptor {
  static constexpr std::size_t kLocalBins = 352;
  static constexpr std::size_t kGlobalBins = 308;

  DescriptorKind kind = DescriptorKind::kLocal;
  std::vector<double> bins;
};

struct ObjectTemplate {
  std::string label;
  PointCloud cloud;
  NormalField normals;
  Descriptor global;
  std::vector<std::pair<Vec3, Descriptor>> locals;  // (keypoint, descriptor)
};

struct MatchResult {
  std::string label;
  double score = 0.0;  // histogram intersection of the winning template
};

struct PoseEstimate {
  std::string label;
  RigidTransform pose;  // object frame expressed in the cloud's frame
  double confidence = 0.0;
  bool orientation_valid = true;
};

// Frame axes from the eigen-decomposition of the (radius - distance) weighted
// covariance of the neighborhood; x spans the largest spread, z = x cross y.
// Each of x and y is flipped so the majority of neighbors project positively.
// Throws DegenerateInputError with fewer than 3 neighbors or rank < 2.
LocalFrame local_frame(const PointCloud& cloud, const NeighborIndex& index,
                       const Vec3& center, double radius);
LocalFrame local_frame(const PointCloud& cloud, const Vec3& center,
                       double radius);

Descriptor local_descriptor(const PointCloud& cloud, const NormalField& normals,
                            const NeighborIndex& index, const Vec3& keypoint,
                            double radius);
Descriptor local_descriptor(const PointCloud& cloud, const NormalField& normals,
                            const Vec3& keypoint, double radius);

Descriptor global_descriptor(const PointCloud& cloud,
                             const NormalField& normals);

// sum(min(a_i, b_i)) in [0, 1] for normalized inputs; throws Error when the
// kinds or lengths differ.
double histogram_intersection(const Descriptor& a, const Descriptor& b);
double descriptor_distance(const Descriptor& a, const Descriptor& b);

// Best template by histogram intersection against the query's kind (global
// queries compare to template globals; local queries to each template's best
// local).  Returns nothing when the database is empty or the best score is
// below the threshold.  Earlier templates win ties.
std::optional<MatchResult> match(const Descriptor& query,
                                 const std::vector<ObjectTemplate>& db,
                                 double threshold);

// Translation is the cluster centroid exactly; rotation aligns the template's
// whole-cloud frame to the cluster's.  A degenerate frame on either side
// yields identity rotation, confidence 0 and orientation_valid = false.
PoseEstimate estimate_pose(const PointCloud& cluster_cloud,
                           const ObjectTemplate& tmpl, double match_score = 1.0);

ObjectTemplate make_template(const std::string& label, const PointCloud& cloud,
                             const RecognitionParams& params);

// One directory per template: model.cloud plus global.desc ("descriptor v1"
// ASCII).  The directory name is the label.  Loading recomputes descriptors
// from the stored cloud and fails if they disagree with the stored file.
void save_template(const std::filesystem::path& dir, const ObjectTemplate& t);
ObjectTemplate load_template(const std::filesystem::path& dir,
                             const RecognitionParams& params);
std::vector<ObjectTemplate> load_template_db(const std::filesystem::path& root,
                                             const RecognitionParams& params);

void write_descriptor_file(const std::filesystem::path& path,
                           const Descriptor& d);
Descriptor read_descriptor_file(const std::filesystem::path& path);

// Full scene pass: dominant-plane removal, clustering, per-cluster global
// descriptor match and pose estimate.  Clusters that match nothing are
// labeled "unknown" with identity rotation.  Cluster order (largest first)
// is preserved in the output.
std::vector<PoseEstimate> recognize_scene(const PointCloud& cloud,
                                          const std::vector<ObjectTemplate>& db,
                                          const PerceptionParams& pp,
                                          const RecognitionParams& rp,
                                          std::uint64_t seed);

}  // namespace vtg
