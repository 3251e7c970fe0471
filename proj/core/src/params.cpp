#include "vtg/params.hpp"

#include <charconv>

#include "vtg/error.hpp"

namespace vtg {
namespace {

double parse_num(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("invalid numeric value '" + value + "' for " + key);
  }
  return out;
}

}  // namespace

std::string to_string(Polarity p) {
  return p == Polarity::kAsWritten ? "as-written" : "fig6";
}

Polarity polarity_from_string(const std::string& s) {
  if (s == "as-written") return Polarity::kAsWritten;
  if (s == "fig6") return Polarity::kFig6;
  throw ConfigError("invalid polarity '" + s + "' (use as-written or fig6)");
}

void apply_override(Params& p, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  if (key == "perception.normal_radius") {
    p.perception.normal_radius = parse_num(key, value);
  } else if (key == "perception.ransac_threshold") {
    p.perception.ransac_threshold = parse_num(key, value);
  } else if (key == "perception.ransac_iters") {
    p.perception.ransac_iters = int(parse_num(key, value));
  } else if (key == "perception.cluster_tolerance") {
    p.perception.cluster_tolerance = parse_num(key, value);
  } else if (key == "perception.cluster_min_size") {
    p.perception.cluster_min_size = std::size_t(parse_num(key, value));
  } else if (key == "perception.cluster_max_size") {
    p.perception.cluster_max_size = std::size_t(parse_num(key, value));
  } else if (key == "perception.hue_tolerance") {
    p.perception.hue_tolerance_deg = parse_num(key, value);
  } else if (key == "recognition.match_threshold") {
    p.recognition.match_threshold = parse_num(key, value);
  } else if (key == "recognition.local_radius") {
    p.recognition.local_radius = parse_num(key, value);
  } else if (key == "recognition.normal_radius") {
    p.recognition.normal_radius = parse_num(key, value);
  } else if (key == "recognition.keypoint_stride") {
    p.recognition.keypoint_stride = int(parse_num(key, value));
  } else if (key == "tactile.cutoff_hz") {
    p.tactile.cutoff_hz = parse_num(key, value);
  } else if (key == "tactile.touch_threshold") {
    p.tactile.touch_threshold = parse_num(key, value);
  } else if (key == "tactile.object_threshold") {
    p.tactile.object_threshold = parse_num(key, value);
  } else if (key == "tactile.touch_polarity") {
    p.tactile.touch_polarity = polarity_from_string(value);
  } else if (key == "tactile.object_polarity") {
    p.tactile.object_polarity = polarity_from_string(value);
  } else if (key == "tactile.baseline_frames") {
    p.tactile.baseline_frames = std::size_t(parse_num(key, value));
  } else {
    throw ConfigError("unknown override key '" + key + "'");
  }
}

void apply_overrides(Params& p, const std::vector<std::string>& assignments) {
  for (const std::string& a : assignments) apply_override(p, a);
}

}  // namespace vtg
