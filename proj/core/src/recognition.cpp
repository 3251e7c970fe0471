#include "vtg/recognition.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vtg/cloud_io.hpp"
#include "vtg/error.hpp"

namespace vtg {
namespace {

constexpr std::size_t kAzimuthBins = 8;
constexpr std::size_t kCosineBins = 11;
constexpr std::size_t kAngleBins = 45;
constexpr std::size_t kViewpointBins = 128;

Eigen::Vector3d to_eigen(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 from_eigen(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

// Splits a unit weight between the two bins adjacent to t*count - 0.5, with
// t already mapped into [0, 1].
void soft_bin(std::vector<double>& bins, std::size_t offset, std::size_t count,
              double t) {
  double u = t * double(count) - 0.5;
  u = std::clamp(u, 0.0, double(count - 1));
  const std::size_t lo = std::size_t(u);
  const std::size_t hi = std::min(lo + 1, count - 1);
  const double frac = u - double(lo);
  bins[offset + lo] += 1.0 - frac;
  bins[offset + hi] += frac;
}

void l1_normalize(std::vector<double>& bins) {
  double sum = 0;
  for (double v : bins) sum += v;
  if (sum <= 0) return;
  for (double& v : bins) v /= sum;
}

void flip_to_majority(const PointCloud& cloud, const std::vector<int>& neighbors,
                      const Vec3& center, Vec3& axis) {
  int pos = 0, neg = 0;
  for (int idx : neighbors) {
    const double proj = (cloud.points[std::size_t(idx)] - center).dot(axis);
    if (proj > 1e-12) ++pos;
    else if (proj < -1e-12) ++neg;
  }
  if (neg > pos) axis = axis * -1.0;
}

LocalFrame frame_from_neighbors(const PointCloud& cloud,
                                const std::vector<int>& neighbors,
                                const Vec3& center, double radius) {
  if (neighbors.size() < 3) {
    throw DegenerateInputError("local frame needs at least 3 neighbors");
  }
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double weight_sum = 0;
  for (int idx : neighbors) {
    const Vec3 rel = cloud.points[std::size_t(idx)] - center;
    const double w = radius - rel.norm();
    if (w <= 0) continue;
    const Eigen::Vector3d d = to_eigen(rel);
    cov += w * d * d.transpose();
    weight_sum += w;
  }
  if (weight_sum <= 0) {
    throw DegenerateInputError("all neighbors on the support boundary");
  }
  cov /= weight_sum;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d evals = es.eigenvalues();  // ascending
  if (evals(2) <= 0 || evals(1) <= evals(2) * 1e-9) {
    throw DegenerateInputError("rank-deficient neighborhood");
  }

  LocalFrame f;
  f.origin = center;
  f.x = from_eigen(es.eigenvectors().col(2));
  f.y = from_eigen(es.eigenvectors().col(1));
  flip_to_majority(cloud, neighbors, center, f.x);
  flip_to_majority(cloud, neighbors, center, f.y);
  f.z = f.x.cross(f.y);
  return f;
}

// Whole-cloud frame used for pose alignment: anchored at the centroid with a
// support that covers every point.
LocalFrame cloud_frame(const PointCloud& cloud) {
  const Vec3 c = centroid(cloud);
  double max_dist = 0;
  std::vector<int> all(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    all[i] = int(i);
    max_dist = std::max(max_dist, distance(cloud.points[i], c));
  }
  return frame_from_neighbors(cloud, all, c, max_dist * (1.0 + 1e-9) + 1e-12);
}

Eigen::Matrix3d axes_matrix(const LocalFrame& f) {
  Eigen::Matrix3d m;
  m.col(0) = to_eigen(f.x);
  m.col(1) = to_eigen(f.y);
  m.col(2) = to_eigen(f.z);
  return m;
}

void check_sizes(const PointCloud& cloud, const NormalField& normals) {
  if (normals.size() != cloud.size()) {
    throw DegenerateInputError("normal field does not match cloud size");
  }
}

const char* kind_name(DescriptorKind k) {
  return k == DescriptorKind::kLocal ? "local" : "global";
}

std::size_t kind_bins(DescriptorKind k) {
  return k == DescriptorKind::kLocal ? Descriptor::kLocalBins
                                     : Descriptor::kGlobalBins;
}

[[noreturn]] void io_fail(const std::filesystem::path& path, int line,
                          const std::string& msg) {
  throw IoError(path.filename().string() + ":" + std::to_string(line) + ": " +
                msg);
}

}  // namespace

LocalFrame local_frame(const PointCloud& cloud, const NeighborIndex& index,
                       const Vec3& center, double radius) {
  return frame_from_neighbors(cloud, index.radius_search(center, radius),
                              center, radius);
}

LocalFrame local_frame(const PointCloud& cloud, const Vec3& center,
                       double radius) {
  return local_frame(cloud, NeighborIndex(cloud), center, radius);
}

Descriptor local_descriptor(const PointCloud& cloud, const NormalField& normals,
                            const NeighborIndex& index, const Vec3& keypoint,
                            double radius) {
  check_sizes(cloud, normals);
  Descriptor d;
  d.kind = DescriptorKind::kLocal;
  d.bins.assign(Descriptor::kLocalBins, 0.0);

  const std::vector<int> neighbors = index.radius_search(keypoint, radius);
  if (neighbors.empty()) return d;

  const LocalFrame f = frame_from_neighbors(cloud, neighbors, keypoint, radius);
  for (int idx : neighbors) {
    const std::size_t i = std::size_t(idx);
    if (normals.degenerate[i]) continue;
    const Vec3 rel = cloud.points[i] - keypoint;
    const double qx = rel.dot(f.x);
    const double qy = rel.dot(f.y);
    const double qz = rel.dot(f.z);

    const double az = std::atan2(qy, qx);
    std::size_t az_bin = std::size_t(
        std::clamp((az + M_PI) / (2.0 * M_PI) * double(kAzimuthBins), 0.0,
                   double(kAzimuthBins - 1)));
    const std::size_t el_bin = qz < 0 ? 0 : 1;
    const std::size_t rad_bin = rel.norm() < radius * 0.5 ? 0 : 1;
    const std::size_t sector = (az_bin * 2 + el_bin) * 2 + rad_bin;

    const double cosang = std::clamp(normals.normals[i].dot(f.z), -1.0, 1.0);
    soft_bin(d.bins, sector * kCosineBins, kCosineBins, (cosang + 1.0) / 2.0);
  }
  l1_normalize(d.bins);
  return d;
}

Descriptor local_descriptor(const PointCloud& cloud, const NormalField& normals,
                            const Vec3& keypoint, double radius) {
  return local_descriptor(cloud, normals, NeighborIndex(cloud), keypoint,
                          radius);
}

Descriptor global_descriptor(const PointCloud& cloud,
                             const NormalField& normals) {
  if (cloud.empty()) {
    throw DegenerateInputError("global descriptor needs a nonempty cloud");
  }
  check_sizes(cloud, normals);

  Descriptor g;
  g.kind = DescriptorKind::kGlobal;
  g.bins.assign(Descriptor::kGlobalBins, 0.0);

  const Vec3 c = centroid(cloud);

  Vec3 avg_normal{0, 0, 0};
  std::size_t valid = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (normals.degenerate[i]) continue;
    avg_normal = avg_normal + normals.normals[i];
    ++valid;
  }
  if (valid == 0) return g;  // nothing contributes: all-zero descriptor

  Vec3 u = avg_normal;
  if (u.norm() < 1e-12) u = cloud.viewpoint - c;
  if (u.norm() < 1e-12) u = {0, 0, 1};
  u = u.normalized();

  Vec3 vdir = cloud.viewpoint - c;
  vdir = vdir.norm() < 1e-12 ? Vec3{0, 0, 1} : vdir.normalized();

  double max_dist = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (normals.degenerate[i]) continue;
    max_dist = std::max(max_dist, distance(cloud.points[i], c));
  }

  constexpr std::size_t kAlphaOff = 0;
  constexpr std::size_t kPhiOff = kAngleBins;
  constexpr std::size_t kThetaOff = 2 * kAngleBins;
  constexpr std::size_t kDistOff = 3 * kAngleBins;
  constexpr std::size_t kViewOff = 4 * kAngleBins;

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (normals.degenerate[i]) continue;
    const Vec3& n = normals.normals[i];
    const Vec3 dvec = cloud.points[i] - c;
    const double dist = dvec.norm();

    soft_bin(g.bins, kDistOff, kAngleBins, max_dist > 0 ? dist / max_dist : 0.0);
    soft_bin(g.bins, kViewOff, kViewpointBins,
             (std::clamp(n.dot(vdir), -1.0, 1.0) + 1.0) / 2.0);

    if (dist < 1e-12) continue;
    const Vec3 dhat = dvec / dist;
    const double phi = std::clamp(dhat.dot(u), -1.0, 1.0);
    soft_bin(g.bins, kPhiOff, kAngleBins, (phi + 1.0) / 2.0);

    Vec3 vax = dhat.cross(u);
    const double vn = vax.norm();
    if (vn < 1e-9) continue;
    vax = vax / vn;
    const Vec3 wax = u.cross(vax);
    const double alpha = std::clamp(vax.dot(n), -1.0, 1.0);
    const double theta = std::atan2(wax.dot(n), u.dot(n));
    soft_bin(g.bins, kAlphaOff, kAngleBins, (alpha + 1.0) / 2.0);
    soft_bin(g.bins, kThetaOff, kAngleBins, (theta + M_PI) / (2.0 * M_PI));
  }
  l1_normalize(g.bins);
  return g;
}

double histogram_intersection(const Descriptor& a, const Descriptor& b) {
  if (a.kind != b.kind) {
    throw Error(std::string("descriptor kind mismatch: ") + kind_name(a.kind) +
                " vs " + kind_name(b.kind));
  }
  if (a.bins.size() != b.bins.size()) {
    throw Error("descriptor length mismatch: " + std::to_string(a.bins.size()) +
                " vs " + std::to_string(b.bins.size()));
  }
  double sum = 0;
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    sum += std::min(a.bins[i], b.bins[i]);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double descriptor_distance(const Descriptor& a, const Descriptor& b) {
  return 1.0 - histogram_intersection(a, b);
}

std::optional<MatchResult> match(const Descriptor& query,
                                 const std::vector<ObjectTemplate>& db,
                                 double threshold) {
  std::optional<MatchResult> best;
  for (const ObjectTemplate& t : db) {
    double score = 0;
    if (query.kind == DescriptorKind::kGlobal) {
      score = histogram_intersection(query, t.global);
    } else {
      for (const auto& [keypoint, d] : t.locals) {
        score = std::max(score, histogram_intersection(query, d));
      }
    }
    if (!best || score > best->score) best = MatchResult{t.label, score};
  }
  if (!best || best->score < threshold) return std::nullopt;
  return best;
}

PoseEstimate estimate_pose(const PointCloud& cluster_cloud,
                           const ObjectTemplate& tmpl, double match_score) {
  PoseEstimate out;
  out.label = tmpl.label;
  out.pose.rotation = Quat::identity();
  out.pose.translation = centroid(cluster_cloud);
  out.pose.from_frame = tmpl.label;
  out.pose.to_frame = "camera";
  out.confidence = match_score;
  try {
    const LocalFrame fc = cloud_frame(cluster_cloud);
    const LocalFrame ft = cloud_frame(tmpl.cloud);
    const Eigen::Matrix3d r = axes_matrix(fc) * axes_matrix(ft).transpose();
    const Eigen::Quaterniond q(r);
    out.pose.rotation = Quat{q.w(), q.x(), q.y(), q.z()}.normalized();
  } catch (const DegenerateInputError&) {
    out.pose.rotation = Quat::identity();
    out.confidence = 0.0;
    out.orientation_valid = false;
  }
  return out;
}

ObjectTemplate make_template(const std::string& label, const PointCloud& cloud,
                             const RecognitionParams& params) {
  ObjectTemplate t;
  t.label = label;
  t.cloud = cloud;
  t.normals = estimate_normals(cloud, params.normal_radius);
  t.global = global_descriptor(cloud, t.normals);

  const NeighborIndex index(cloud);
  const std::size_t stride = std::size_t(std::max(1, params.keypoint_stride));
  for (std::size_t i = 0; i < cloud.size(); i += stride) {
    if (t.normals.degenerate[i]) continue;
    try {
      Descriptor d = local_descriptor(cloud, t.normals, index, cloud.points[i],
                                      params.local_radius);
      t.locals.emplace_back(cloud.points[i], std::move(d));
    } catch (const DegenerateInputError&) {
      continue;  // keypoint support too thin; skip it
    }
  }
  return t;
}

void write_descriptor_file(const std::filesystem::path& path,
                           const Descriptor& d) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "descriptor v1 kind=" << kind_name(d.kind) << " bins=" << d.bins.size()
      << "\n";
  char buf[40];
  for (double v : d.bins) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << "\n";
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Descriptor read_descriptor_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) io_fail(path, 1, "missing header");
  std::istringstream header(line);
  std::string magic, version, kind_tok, bins_tok;
  header >> magic >> version >> kind_tok >> bins_tok;
  if (magic != "descriptor" || version != "v1") {
    io_fail(path, 1, "expected 'descriptor v1' header");
  }

  Descriptor d;
  if (kind_tok == "kind=local") d.kind = DescriptorKind::kLocal;
  else if (kind_tok == "kind=global") d.kind = DescriptorKind::kGlobal;
  else io_fail(path, 1, "unknown descriptor kind '" + kind_tok + "'");

  std::size_t count = 0;
  if (bins_tok.rfind("bins=", 0) != 0) io_fail(path, 1, "missing bins= field");
  const std::string count_str = bins_tok.substr(5);
  const auto res = std::from_chars(count_str.data(),
                                   count_str.data() + count_str.size(), count);
  if (res.ec != std::errc() || res.ptr != count_str.data() + count_str.size()) {
    io_fail(path, 1, "bad bins count '" + count_str + "'");
  }
  if (count != kind_bins(d.kind)) {
    io_fail(path, 1, "kind " + std::string(kind_name(d.kind)) + " requires " +
                         std::to_string(kind_bins(d.kind)) + " bins, got " +
                         std::to_string(count));
  }

  d.bins.reserve(count);
  int line_no = 1;
  while (d.bins.size() < count) {
    ++line_no;
    if (!std::getline(in, line)) {
      io_fail(path, line_no, "expected " + std::to_string(count) +
                                 " values, got " + std::to_string(d.bins.size()));
    }
    if (line.empty()) io_fail(path, line_no, "blank value line");
    double v = 0;
    const auto vres = std::from_chars(line.data(), line.data() + line.size(), v);
    if (vres.ec != std::errc() || vres.ptr != line.data() + line.size() ||
        !std::isfinite(v)) {
      io_fail(path, line_no, "bad value '" + line + "'");
    }
    if (v < 0) io_fail(path, line_no, "negative bin value");
    d.bins.push_back(v);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty()) io_fail(path, line_no, "trailing content");
  }
  return d;
}

void save_template(const std::filesystem::path& dir, const ObjectTemplate& t) {
  std::filesystem::create_directories(dir);
  save_cloud_file((dir / "model.cloud").string(), t.cloud);
  write_descriptor_file(dir / "global.desc", t.global);
}

ObjectTemplate load_template(const std::filesystem::path& dir,
                             const RecognitionParams& params) {
  const std::filesystem::path cloud_path = dir / "model.cloud";
  if (!std::filesystem::exists(cloud_path)) {
    throw IoError("no template at '" + dir.string() + "' (missing model.cloud)");
  }
  const PointCloud cloud = load_cloud_file(cloud_path.string());
  ObjectTemplate t = make_template(dir.filename().string(), cloud, params);

  const Descriptor stored = read_descriptor_file(dir / "global.desc");
  if (stored.bins.size() != t.global.bins.size()) {
    throw IoError("stored descriptor in '" + dir.string() + "' has wrong size");
  }
  for (std::size_t i = 0; i < stored.bins.size(); ++i) {
    if (std::abs(stored.bins[i] - t.global.bins[i]) > 1e-6) {
      throw IoError("stored descriptor in '" + dir.string() +
                    "' disagrees with its cloud");
    }
  }
  return t;
}

std::vector<ObjectTemplate> load_template_db(const std::filesystem::path& root,
                                             const RecognitionParams& params) {
  if (!std::filesystem::is_directory(root)) {
    throw IoError("template database '" + root.string() + "' is not a directory");
  }
  std::vector<ObjectTemplate> db;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    if (!std::filesystem::exists(entry.path() / "model.cloud")) continue;
    db.push_back(load_template(entry.path(), params));
  }
  std::sort(db.begin(), db.end(),
            [](const ObjectTemplate& a, const ObjectTemplate& b) {
              return a.label < b.label;
            });
  return db;
}

std::vector<PoseEstimate> recognize_scene(const PointCloud& cloud,
                                          const std::vector<ObjectTemplate>& db,
                                          const PerceptionParams& pp,
                                          const RecognitionParams& rp,
                                          std::uint64_t seed) {
  std::vector<PoseEstimate> out;
  if (cloud.size() < 3) return out;

  const PlaneFit plane =
      segment_plane_ransac(cloud, pp.ransac_threshold, pp.ransac_iters, seed);
  const PointCloud objects = remove_indices(cloud, plane.inliers);
  const auto clusters = euclidean_cluster(objects, pp.cluster_tolerance,
                                          pp.cluster_min_size,
                                          pp.cluster_max_size);
  for (const Cluster& cluster : clusters) {
    const PointCloud sub = extract(objects, cluster);
    const NormalField nf = estimate_normals(sub, rp.normal_radius);
    const Descriptor g = global_descriptor(sub, nf);
    const auto m = match(g, db, rp.match_threshold);
    if (m) {
      const auto it =
          std::find_if(db.begin(), db.end(), [&](const ObjectTemplate& t) {
            return t.label == m->label;
          });
      out.push_back(estimate_pose(sub, *it, m->score));
    } else {
      PoseEstimate e;
      e.label = "unknown";
      e.pose.rotation = Quat::identity();
      e.pose.translation = centroid(sub);
      e.pose.from_frame = "unknown";
      e.pose.to_frame = "camera";
      e.confidence = 0.0;
      e.orientation_valid = false;
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace vtg
