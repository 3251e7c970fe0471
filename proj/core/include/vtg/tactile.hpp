#pragma once

// Streaming proximity-signal processing for a three-finger hand.  Each raw
// analog channel is split into a slow component (baseline-subtracted raw) and
// a fast component (first-order high-pass), and two hysteresis detectors turn
// those into discrete events:
//
//   slow crossing the object threshold   -> ObjectDetected / ObjectSeparated
//   fast crossing the touch threshold    -> Contact / Release
//
// Filter: y[n] = alpha * (y[n-1] + x[n] - x[n-1]), alpha = 1/(1 + 2*pi*fc*dt).
// All math is parameterized by dt, so logs replay identically at any rate.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "vtg/params.hpp"

namespace vtg {

struct TactileFrame {
  double t = 0.0;               // seconds, strictly increasing in a stream
  std::array<double, 3> raw{};  // analog counts, one per finger
};

struct HighpassState {
  double prev_raw = 0.0;
  double prev_out = 0.0;
};

struct FingerChannel {
  double baseline = 0.0;
  double sai = 0.0;  // slow: raw - baseline
  double fai = 0.0;  // fast: high-pass output
  HighpassState filter;
  bool touch = false;
  bool detected = false;
};

struct ChannelState {
  std::array<FingerChannel, 3> fingers;
  double last_t = 0.0;
  bool calibrated = false;
};

enum class EventKind { kObjectDetected, kContact, kObjectSeparated, kRelease };

const char* to_string(EventKind kind);

struct TactileEvent {
  double t = 0.0;
  int finger = 1;  // 1-3
  EventKind kind = EventKind::kObjectDetected;
};

// One filter update; returns the new output and advances the memory.
// Throws DegenerateInputError for dt <= 0.
double highpass_step(HighpassState& state, double x, double dt,
                     double cutoff_hz);

// Baselines = per-finger means over the window (>= 10 frames); clears all
// flags, zeroes the channels and primes the filter memory so that a
// continuation at the baseline level produces no output.
void calibrate_baseline(ChannelState& state,
                        const std::vector<TactileFrame>& samples);

// Hysteresis detectors.  kAsWritten sets on the signal falling below
// -threshold and clears above +threshold; kFig6 mirrors that.  Values in the
// dead zone between the thresholds change nothing.
void detect_touch(ChannelState& state, const std::array<double, 3>& fai,
                  const TactileParams& cfg);
void detect_object(ChannelState& state, const std::array<double, 3>& sai,
                   const TactileParams& cfg);

// Full per-frame update: high-pass, slow channel, both detectors; returns one
// event per flag transition (per finger: object event before touch event,
// fingers in ascending order).  Throws on non-increasing timestamps or an
// uncalibrated state.
std::vector<TactileEvent> process_frame(ChannelState& state,
                                        const TactileFrame& frame,
                                        const TactileParams& cfg);

// CSV with header "t,f1,f2,f3"; timestamps must be strictly increasing.
std::vector<TactileFrame> load_tactile_csv(std::istream& in,
                                           const std::string& name = "<stream>");
std::vector<TactileFrame> load_tactile_csv_file(const std::string& path);
void save_tactile_csv(std::ostream& out, const std::vector<TactileFrame>& frames);
void save_tactile_csv_file(const std::string& path,
                           const std::vector<TactileFrame>& frames);

}  // namespace vtg
