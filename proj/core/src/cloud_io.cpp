#include "vtg/cloud_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vtg {
namespace {

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw IoError(name + ":" + std::to_string(line) + ": " + msg);
}

bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

PointCloud load_cloud(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) fail(name, 1, "missing header");

  std::istringstream header(line);
  std::string magic, version, n_tok, color_tok, vp_tok;
  header >> magic >> version >> n_tok >> color_tok >> vp_tok;
  if (magic != "cloud" || version != "v1") {
    fail(name, 1, "expected 'cloud v1' header");
  }
  if (n_tok.rfind("n=", 0) != 0 || color_tok.rfind("color=", 0) != 0 ||
      vp_tok.rfind("viewpoint=", 0) != 0) {
    fail(name, 1, "malformed header fields");
  }

  long count = -1;
  try {
    count = std::stol(n_tok.substr(2));
  } catch (const std::exception&) {
    fail(name, 1, "invalid point count");
  }
  if (count < 0) fail(name, 1, "invalid point count");

  const std::string color_val = color_tok.substr(6);
  if (color_val != "0" && color_val != "1") {
    fail(name, 1, "color flag must be 0 or 1");
  }
  const bool has_color = color_val == "1";

  PointCloud cloud;
  std::string vx = vp_tok.substr(10), vy, vz;
  header >> vy >> vz;
  if (!parse_double(vx, cloud.viewpoint.x) ||
      !parse_double(vy, cloud.viewpoint.y) ||
      !parse_double(vz, cloud.viewpoint.z)) {
    fail(name, 1, "invalid viewpoint");
  }
  std::string extra;
  if (header >> extra) fail(name, 1, "trailing tokens in header");

  cloud.points.reserve(std::size_t(count));
  if (has_color) cloud.colors.reserve(std::size_t(count));

  int line_no = 1;
  long seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> vals;
    while (ls >> tok) {
      double v = 0.0;
      if (!parse_double(tok, v)) fail(name, line_no, "invalid number '" + tok + "'");
      vals.push_back(v);
    }
    if (vals.empty()) {
      if (seen == count) continue;  // allow trailing blank lines
      fail(name, line_no, "blank line inside point data");
    }
    if (seen == count) fail(name, line_no, "more points than header count");
    const std::size_t expect = has_color ? 6 : 3;
    if (vals.size() != expect) {
      fail(name, line_no,
           "expected " + std::to_string(expect) + " values, got " +
               std::to_string(vals.size()));
    }
    cloud.points.push_back({vals[0], vals[1], vals[2]});
    if (has_color) cloud.colors.push_back({vals[3], vals[4], vals[5]});
    ++seen;
  }
  if (seen != count) {
    fail(name, line_no,
         "header promised " + std::to_string(count) + " points, found " +
             std::to_string(seen));
  }
  return cloud;
}

PointCloud load_cloud_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cloud file '" + path + "'");
  return load_cloud(in, path);
}

void save_cloud(std::ostream& out, const PointCloud& cloud) {
  if (cloud.has_colors() && cloud.colors.size() != cloud.points.size()) {
    throw IoError("cloud has a color count different from its point count");
  }
  out << "cloud v1 n=" << cloud.size() << " color=" << (cloud.has_colors() ? 1 : 0)
      << " viewpoint=" << format_double(cloud.viewpoint.x) << ' '
      << format_double(cloud.viewpoint.y) << ' '
      << format_double(cloud.viewpoint.z) << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << format_double(p.x) << ' ' << format_double(p.y) << ' '
        << format_double(p.z);
    if (cloud.has_colors()) {
      const Vec3& c = cloud.colors[i];
      out << ' ' << format_double(c.x) << ' ' << format_double(c.y) << ' '
          << format_double(c.z);
    }
    out << '\n';
  }
}

void save_cloud_file(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_cloud(out, cloud);
  if (!out.good()) throw IoError("failed writing cloud to '" + path + "'");
}

}  // namespace vtg
