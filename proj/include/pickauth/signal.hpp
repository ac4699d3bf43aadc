#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pickauth/series.hpp"

namespace pickauth::sig {

/// Timestamped 6-axis inertial measurement. Acceleration in m/s^2, angular
/// rate in rad/s, time in milliseconds.
struct SensorSample {
  double t_ms = 0.0;
  std::array<double, 3> acc{};
  std::array<double, 3> gyro{};
};

enum class EventKind { Trigger };

struct TraceEvent {
  double t_ms = 0.0;
  EventKind kind = EventKind::Trigger;
};

/// Raw recording: samples with strictly increasing timestamps plus wake-up
/// events that must lie within the sampled time range.
class SensorTrace {
public:
  SensorTrace(std::vector<SensorSample> samples, std::vector<TraceEvent> events,
              double nominal_rate_hz);

  const std::vector<SensorSample>& samples() const noexcept { return samples_; }
  const std::vector<TraceEvent>& events() const noexcept { return events_; }
  double nominal_rate_hz() const noexcept { return nominal_rate_hz_; }

private:
  std::vector<SensorSample> samples_;
  std::vector<TraceEvent> events_;
  double nominal_rate_hz_ = 0.0;
};

/// Flat-interval criterion: per-axis variance bounds over a sliding window.
struct FlatParams {
  double t_f_s = 0.5;          // minimum flat duration
  double epsilon_acc = 0.05;   // (m/s^2)^2
  double epsilon_gyr = 0.005;  // (rad/s)^2
  std::size_t window = 10;     // samples; 0.2 s at the default 50 Hz
};

struct ExtractParams {
  FlatParams flat{};
  double min_duration_s = 0.5;
  double max_duration_s = 4.0;
  double max_backtrack_s = 4.0;
};

inline const std::vector<std::string>& default_channel_ids() {
  static const std::vector<std::string> ids{"acc-x", "acc-y", "acc-z",
                                            "gyr-x", "gyr-y", "gyr-z"};
  return ids;
}

/// The unit of matching: a 6-channel window from the end of a stable interval
/// (t_begin) to the wake-up trigger (t_end), resampled to the nominal rate.
struct PickUpSignal {
  MultiSeries signal;
  double t_begin_ms = 0.0;
  double t_end_ms = 0.0;
  std::string user_id;  // optional labels
  std::string context;

  double duration_s() const noexcept { return (t_end_ms - t_begin_ms) / 1000.0; }
};

/// Trigger timestamps in order; candidate t_end values.
std::vector<double> detect_triggers(const SensorTrace& trace);

/// True iff every accelerometer axis variance is at most epsilon_acc and
/// every gyroscope axis variance is at most epsilon_gyr over the window.
bool is_flat(std::span<const SensorSample> window, const FlatParams& params);

/// Scans backwards from t_end for the most recent interval of duration at
/// least t_f whose every sliding window is flat, looking back at most
/// max_backtrack_s. Returns the end time of that interval, or nullopt.
std::optional<double> backtrack_begin(const SensorTrace& trace, double t_end_ms,
                                      const ExtractParams& params);

/// One PickUpSignal per trigger whose backtrack succeeds with an admissible
/// duration; channels are resampled to the trace's nominal rate by linear
/// interpolation. Triggers without a stable prefix are skipped silently.
std::vector<PickUpSignal> extract_pickups(const SensorTrace& trace, const ExtractParams& params);

struct DetectionStats {
  std::size_t detected = 0;
  std::size_t triggers = 0;
  double ratio = 0.0;
  bool undefined = false;  // set when there were no triggers at all
};

DetectionStats detection_stats(std::span<const SensorTrace> traces, const ExtractParams& params);

}  // namespace pickauth::sig
