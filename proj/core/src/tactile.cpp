#include "vtg/tactile.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "vtg/error.hpp"

namespace vtg {
namespace {

constexpr std::size_t kMinBaselineFrames = 10;

void check_finite(const TactileFrame& frame) {
  if (!std::isfinite(frame.t)) {
    throw DegenerateInputError("non-finite timestamp");
  }
  for (double v : frame.raw) {
    if (!std::isfinite(v)) throw DegenerateInputError("non-finite raw sample");
  }
}

// set/clear tests for one hysteresis flag given the configured polarity
bool should_set(double v, double threshold, Polarity p) {
  return p == Polarity::kAsWritten ? v < -threshold : v > threshold;
}

bool should_clear(double v, double threshold, Polarity p) {
  return p == Polarity::kAsWritten ? v > threshold : v < -threshold;
}

[[noreturn]] void csv_fail(const std::string& name, int line,
                           const std::string& msg) {
  throw IoError(name + ":" + std::to_string(line) + ": " + msg);
}

bool parse_field(const std::string& tok, double& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kObjectDetected: return "ObjectDetected";
    case EventKind::kContact: return "Contact";
    case EventKind::kObjectSeparated: return "ObjectSeparated";
    case EventKind::kRelease: return "Release";
  }
  return "?";
}

double highpass_step(HighpassState& state, double x, double dt,
                     double cutoff_hz) {
  if (!(dt > 0)) throw DegenerateInputError("high-pass step needs dt > 0");
  if (!(cutoff_hz > 0)) throw DegenerateInputError("cutoff must be positive");
  const double alpha = 1.0 / (1.0 + 2.0 * M_PI * cutoff_hz * dt);
  const double out = alpha * (state.prev_out + x - state.prev_raw);
  state.prev_raw = x;
  state.prev_out = out;
  return out;
}

void calibrate_baseline(ChannelState& state,
                        const std::vector<TactileFrame>& samples) {
  if (samples.size() < kMinBaselineFrames) {
    throw DegenerateInputError("baseline calibration needs at least " +
                               std::to_string(kMinBaselineFrames) + " frames, got " +
                               std::to_string(samples.size()));
  }
  std::array<double, 3> sums{};
  double prev_t = -std::numeric_limits<double>::infinity();
  for (const TactileFrame& f : samples) {
    check_finite(f);
    if (!(f.t > prev_t)) {
      throw DegenerateInputError("calibration timestamps must increase");
    }
    prev_t = f.t;
    for (int i = 0; i < 3; ++i) sums[std::size_t(i)] += f.raw[std::size_t(i)];
  }
  for (int i = 0; i < 3; ++i) {
    FingerChannel& ch = state.fingers[std::size_t(i)];
    ch.baseline = sums[std::size_t(i)] / double(samples.size());
    ch.sai = 0.0;
    ch.fai = 0.0;
    ch.filter.prev_raw = ch.baseline;
    ch.filter.prev_out = 0.0;
    ch.touch = false;
    ch.detected = false;
  }
  state.last_t = samples.back().t;
  state.calibrated = true;
}

void detect_touch(ChannelState& state, const std::array<double, 3>& fai,
                  const TactileParams& cfg) {
  for (int i = 0; i < 3; ++i) {
    FingerChannel& ch = state.fingers[std::size_t(i)];
    const double v = fai[std::size_t(i)];
    if (!ch.touch && should_set(v, cfg.touch_threshold, cfg.touch_polarity)) {
      ch.touch = true;
    } else if (ch.touch &&
               should_clear(v, cfg.touch_threshold, cfg.touch_polarity)) {
      ch.touch = false;
    }
  }
}

void detect_object(ChannelState& state, const std::array<double, 3>& sai,
                   const TactileParams& cfg) {
  for (int i = 0; i < 3; ++i) {
    FingerChannel& ch = state.fingers[std::size_t(i)];
    const double v = sai[std::size_t(i)];
    if (!ch.detected &&
        should_set(v, cfg.object_threshold, cfg.object_polarity)) {
      ch.detected = true;
    } else if (ch.detected &&
               should_clear(v, cfg.object_threshold, cfg.object_polarity)) {
      ch.detected = false;
    }
  }
}

std::vector<TactileEvent> process_frame(ChannelState& state,
                                        const TactileFrame& frame,
                                        const TactileParams& cfg) {
  if (!state.calibrated) {
    throw DegenerateInputError("tactile state is not calibrated");
  }
  check_finite(frame);
  if (!(frame.t > state.last_t)) {
    throw DegenerateInputError("timestamp " + std::to_string(frame.t) +
                               " does not increase past " +
                               std::to_string(state.last_t));
  }
  const double dt = frame.t - state.last_t;

  std::array<double, 3> sai{};
  std::array<double, 3> fai{};
  std::array<bool, 3> touch_before{};
  std::array<bool, 3> detected_before{};
  for (int i = 0; i < 3; ++i) {
    FingerChannel& ch = state.fingers[std::size_t(i)];
    touch_before[std::size_t(i)] = ch.touch;
    detected_before[std::size_t(i)] = ch.detected;
    ch.fai = highpass_step(ch.filter, frame.raw[std::size_t(i)], dt, cfg.cutoff_hz);
    ch.sai = frame.raw[std::size_t(i)] - ch.baseline;
    sai[std::size_t(i)] = ch.sai;
    fai[std::size_t(i)] = ch.fai;
  }
  detect_object(state, sai, cfg);
  detect_touch(state, fai, cfg);

  std::vector<TactileEvent> events;
  for (int i = 0; i < 3; ++i) {
    const FingerChannel& ch = state.fingers[std::size_t(i)];
    if (ch.detected != detected_before[std::size_t(i)]) {
      events.push_back({frame.t, i + 1,
                        ch.detected ? EventKind::kObjectDetected
                                    : EventKind::kObjectSeparated});
    }
    if (ch.touch != touch_before[std::size_t(i)]) {
      events.push_back({frame.t, i + 1,
                        ch.touch ? EventKind::kContact : EventKind::kRelease});
    }
  }
  state.last_t = frame.t;
  return events;
}

std::vector<TactileFrame> load_tactile_csv(std::istream& in,
                                           const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) csv_fail(name, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,f1,f2,f3") {
    csv_fail(name, 1, "expected header 't,f1,f2,f3', got '" + line + "'");
  }

  std::vector<TactileFrame> frames;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // only trailing blanks are tolerated
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) csv_fail(name, line_no, "content after blank line");
      }
      break;
    }
    std::array<double, 4> vals{};
    std::size_t start = 0;
    for (int field = 0; field < 4; ++field) {
      const std::size_t comma = line.find(',', start);
      const bool last = field == 3;
      if (last != (comma == std::string::npos)) {
        csv_fail(name, line_no, "expected 4 comma-separated fields");
      }
      const std::string tok =
          line.substr(start, last ? std::string::npos : comma - start);
      if (!parse_field(tok, vals[std::size_t(field)])) {
        csv_fail(name, line_no, "bad value '" + tok + "'");
      }
      start = comma + 1;
    }
    TactileFrame frame;
    frame.t = vals[0];
    frame.raw = {vals[1], vals[2], vals[3]};
    if (!frames.empty() && !(frame.t > frames.back().t)) {
      csv_fail(name, line_no, "timestamps must be strictly increasing");
    }
    frames.push_back(frame);
  }
  return frames;
}

std::vector<TactileFrame> load_tactile_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_tactile_csv(in, path);
}

void save_tactile_csv(std::ostream& out,
                      const std::vector<TactileFrame>& frames) {
  out << "t,f1,f2,f3\n";
  char buf[160];
  for (const TactileFrame& f : frames) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", f.t, f.raw[0],
                  f.raw[1], f.raw[2]);
    out << buf;
  }
}

void save_tactile_csv_file(const std::string& path,
                           const std::vector<TactileFrame>& frames) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_tactile_csv(out, frames);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace vtg
