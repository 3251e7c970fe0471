#include "vtg/calibration.hpp"

#include <Eigen/Dense>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vtg/error.hpp"

namespace vtg {
namespace {

[[noreturn]] void obs_fail(const std::string& name, int line,
                           const std::string& msg) {
  throw IoError(name + ":" + std::to_string(line) + ": " + msg);
}

Quat average_rotation(const std::vector<Quat>& quats) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (const Quat& q : quats) {
    const Eigen::Vector4d v(q.w, q.x, q.y, q.z);
    m += v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  const Eigen::Vector4d best = es.eigenvectors().col(3);  // largest eigenvalue
  Quat avg{best(0), best(1), best(2), best(3)};
  avg = avg.normalized();
  // sign-align with the first sample so the output is deterministic
  const Quat& ref = quats.front();
  if (avg.w * ref.w + avg.x * ref.x + avg.y * ref.y + avg.z * ref.z < 0) {
    avg = Quat{-avg.w, -avg.x, -avg.y, -avg.z};
  }
  return avg;
}

}  // namespace

RigidTransform solve_single(const CalibrationObservation& obs,
                            const RigidTransform& wrist_to_tag) {
  return compose(compose(obs.base_to_wrist, wrist_to_tag),
                 inverse(obs.cam_to_tag));
}

CalibrationResult solve_batch(const std::vector<CalibrationObservation>& obs,
                              const RigidTransform& wrist_to_tag) {
  if (obs.empty()) {
    throw DegenerateInputError("calibration needs at least one observation");
  }
  std::vector<RigidTransform> solutions;
  solutions.reserve(obs.size());
  for (const CalibrationObservation& o : obs) {
    solutions.push_back(solve_single(o, wrist_to_tag));
  }

  Vec3 mean{0, 0, 0};
  std::vector<Quat> quats;
  quats.reserve(solutions.size());
  for (const RigidTransform& s : solutions) {
    mean = mean + s.translation;
    quats.push_back(s.rotation);
  }
  mean = mean / double(solutions.size());

  double residual = 0;
  for (const RigidTransform& s : solutions) {
    residual += distance(s.translation, mean);
  }
  residual /= double(solutions.size());

  CalibrationResult result;
  result.base_to_camera = solutions.front();
  result.base_to_camera.translation = mean;
  result.base_to_camera.rotation = average_rotation(quats);
  result.residual = residual;
  result.n_observations = obs.size();
  return result;
}

std::pair<double, double> calibration_error(const RigidTransform& estimate,
                                            const RigidTransform& truth) {
  if (estimate.from_frame != truth.from_frame ||
      estimate.to_frame != truth.to_frame) {
    throw FrameMismatchError("cannot compare " + estimate.from_frame + "->" +
                             estimate.to_frame + " with " + truth.from_frame +
                             "->" + truth.to_frame);
  }
  const double translation = distance(estimate.translation, truth.translation);
  const double rotation_deg =
      estimate.rotation.angle_to(truth.rotation) * 180.0 / M_PI;
  return {translation, rotation_deg};
}

std::vector<CalibrationObservation> load_observations(std::istream& in,
                                                      const std::string& name) {
  std::vector<CalibrationObservation> obs;
  std::string line;
  int line_no = 0;
  bool saw_blank = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      saw_blank = true;
      continue;
    }
    if (saw_blank) obs_fail(name, line_no, "content after blank line");

    std::istringstream tokens(line);
    std::array<double, 14> vals{};
    for (int i = 0; i < 14; ++i) {
      std::string tok;
      if (!(tokens >> tok)) {
        obs_fail(name, line_no, "expected 14 numbers, got " + std::to_string(i));
      }
      const char* begin = tok.data();
      const char* end = begin + tok.size();
      const auto res = std::from_chars(begin, end, vals[std::size_t(i)]);
      if (res.ec != std::errc() || res.ptr != end ||
          !std::isfinite(vals[std::size_t(i)])) {
        obs_fail(name, line_no, "bad value '" + tok + "'");
      }
    }
    std::string extra;
    if (tokens >> extra) obs_fail(name, line_no, "trailing content '" + extra + "'");

    auto build = [&](std::size_t off, const std::string& from,
                     const std::string& to) {
      RigidTransform t;
      t.translation = {vals[off], vals[off + 1], vals[off + 2]};
      t.rotation = Quat{vals[off + 3], vals[off + 4], vals[off + 5], vals[off + 6]};
      const double n = std::sqrt(t.rotation.w * t.rotation.w +
                                 t.rotation.x * t.rotation.x +
                                 t.rotation.y * t.rotation.y +
                                 t.rotation.z * t.rotation.z);
      if (n < 1e-9) obs_fail(name, line_no, "zero quaternion");
      t.rotation = t.rotation.normalized();
      t.from_frame = from;
      t.to_frame = to;
      return t;
    };
    CalibrationObservation o;
    o.cam_to_tag = build(0, "tag", "camera");
    o.base_to_wrist = build(7, "wrist", "base");
    obs.push_back(o);
  }
  return obs;
}

std::vector<CalibrationObservation> load_observations_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_observations(in, path);
}

void save_observations(std::ostream& out,
                       const std::vector<CalibrationObservation>& obs) {
  char buf[340];
  for (const CalibrationObservation& o : obs) {
    const RigidTransform& c = o.cam_to_tag;
    const RigidTransform& b = o.base_to_wrist;
    std::snprintf(buf, sizeof(buf),
                  "%.17g %.17g %.17g %.17g %.17g %.17g %.17g "
                  "%.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  c.translation.x, c.translation.y, c.translation.z,
                  c.rotation.w, c.rotation.x, c.rotation.y, c.rotation.z,
                  b.translation.x, b.translation.y, b.translation.z,
                  b.rotation.w, b.rotation.x, b.rotation.y, b.rotation.z);
    out << buf;
  }
}

void save_observations_file(const std::string& path,
                            const std::vector<CalibrationObservation>& obs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_observations(out, obs);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace vtg
