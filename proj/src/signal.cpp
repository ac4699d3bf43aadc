#include "pickauth/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pickauth::sig {

namespace {

bool finite_sample(const SensorSample& s) {
  if (!std::isfinite(s.t_ms)) return false;
  for (double v : s.acc)
    if (!std::isfinite(v)) return false;
  for (double v : s.gyro)
    if (!std::isfinite(v)) return false;
  return true;
}

double axis_variance(std::span<const SensorSample> window, bool acc, std::size_t axis) {
  const double n = static_cast<double>(window.size());
  double mean = 0.0;
  for (const SensorSample& s : window) mean += acc ? s.acc[axis] : s.gyro[axis];
  mean /= n;
  double var = 0.0;
  for (const SensorSample& s : window) {
    const double d = (acc ? s.acc[axis] : s.gyro[axis]) - mean;
    var += d * d;
  }
  return var / n;
}

// Index of the last sample with t <= t_ms, or nullopt if none.
std::optional<std::size_t> last_sample_at_or_before(const std::vector<SensorSample>& samples,
                                                    double t_ms) {
  auto it = std::upper_bound(samples.begin(), samples.end(), t_ms,
                             [](double t, const SensorSample& s) { return t < s.t_ms; });
  if (it == samples.begin()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(samples.begin(), it)) - 1;
}

std::size_t first_sample_at_or_after(const std::vector<SensorSample>& samples, double t_ms) {
  auto it = std::lower_bound(samples.begin(), samples.end(), t_ms,
                             [](const SensorSample& s, double t) { return s.t_ms < t; });
  return static_cast<std::size_t>(std::distance(samples.begin(), it));
}

double interpolate_at(const std::vector<SensorSample>& samples, double t_ms, bool acc,
                      std::size_t axis) {
  auto pick = [&](const SensorSample& s) { return acc ? s.acc[axis] : s.gyro[axis]; };
  const std::size_t hi = first_sample_at_or_after(samples, t_ms);
  if (hi == 0) return pick(samples.front());
  if (hi >= samples.size()) return pick(samples.back());
  const SensorSample& a = samples[hi - 1];
  const SensorSample& b = samples[hi];
  if (b.t_ms == a.t_ms) return pick(a);
  const double f = (t_ms - a.t_ms) / (b.t_ms - a.t_ms);
  return pick(a) + f * (pick(b) - pick(a));
}

}  // namespace

SensorTrace::SensorTrace(std::vector<SensorSample> samples, std::vector<TraceEvent> events,
                         double nominal_rate_hz)
    : samples_(std::move(samples)), events_(std::move(events)), nominal_rate_hz_(nominal_rate_hz) {
  if (samples_.empty()) throw std::invalid_argument("SensorTrace: no samples");
  if (!(nominal_rate_hz_ > 0.0)) throw std::invalid_argument("SensorTrace: rate must be positive");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!finite_sample(samples_[i])) throw std::invalid_argument("SensorTrace: non-finite sample");
    if (i > 0 && samples_[i].t_ms <= samples_[i - 1].t_ms)
      throw std::invalid_argument("SensorTrace: timestamps must be strictly increasing");
  }
  for (const TraceEvent& e : events_) {
    if (e.t_ms < samples_.front().t_ms || e.t_ms > samples_.back().t_ms)
      throw std::invalid_argument("SensorTrace: event outside the sampled time range");
  }
}

std::vector<double> detect_triggers(const SensorTrace& trace) {
  std::vector<double> out;
  for (const TraceEvent& e : trace.events())
    if (e.kind == EventKind::Trigger) out.push_back(e.t_ms);
  return out;
}

bool is_flat(std::span<const SensorSample> window, const FlatParams& params) {
  if (window.empty()) throw std::invalid_argument("is_flat: empty window");
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (axis_variance(window, true, axis) > params.epsilon_acc) return false;
  }
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (axis_variance(window, false, axis) > params.epsilon_gyr) return false;
  }
  return true;
}

std::optional<double> backtrack_begin(const SensorTrace& trace, double t_end_ms,
                                      const ExtractParams& params) {
  const auto& samples = trace.samples();
  if (t_end_ms < samples.front().t_ms || t_end_ms > samples.back().t_ms)
    throw std::invalid_argument("backtrack_begin: t_end outside the trace");

  const auto end_idx = last_sample_at_or_before(samples, t_end_ms);
  if (!end_idx) return std::nullopt;
  const double cap_start_ms = t_end_ms - params.max_backtrack_s * 1000.0;
  const std::size_t lo = first_sample_at_or_after(samples, cap_start_ms);

  const std::size_t w = params.flat.window;
  if (w == 0) throw std::invalid_argument("backtrack_begin: window must be positive");
  if (*end_idx < lo || *end_idx - lo + 1 < w) return std::nullopt;

  // Flat flags for every window start in the capped range, then scan runs of
  // consecutive flat windows from the most recent backwards.
  const std::size_t last_start = *end_idx - w + 1;
  const double t_f_ms = params.flat.t_f_s * 1000.0;
  std::vector<char> flat(last_start - lo + 1);
  for (std::size_t j = lo; j <= last_start; ++j)
    flat[j - lo] = is_flat(std::span<const SensorSample>(&samples[j], w), params.flat) ? 1 : 0;

  std::size_t idx = flat.size();
  while (idx > 0) {
    if (!flat[idx - 1]) {
      --idx;
      continue;
    }
    std::size_t run_hi = idx - 1;
    std::size_t run_lo = run_hi;
    while (run_lo > 0 && flat[run_lo - 1]) --run_lo;
    const double span_ms = samples[lo + run_hi + w - 1].t_ms - samples[lo + run_lo].t_ms;
    if (span_ms >= t_f_ms) return samples[lo + run_hi + w - 1].t_ms;
    idx = run_lo;
  }
  return std::nullopt;
}

std::vector<PickUpSignal> extract_pickups(const SensorTrace& trace, const ExtractParams& params) {
  std::vector<PickUpSignal> out;
  const auto& samples = trace.samples();
  for (double t_end : detect_triggers(trace)) {
    const auto t_begin = backtrack_begin(trace, t_end, params);
    if (!t_begin) continue;
    const double duration_s = (t_end - *t_begin) / 1000.0;
    if (duration_s < params.min_duration_s || duration_s > params.max_duration_s) continue;

    const double rate = trace.nominal_rate_hz();
    const std::size_t points =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(duration_s * rate)) + 1);
    const double step_ms = (t_end - *t_begin) / static_cast<double>(points - 1);

    std::vector<Series> channels;
    channels.reserve(6);
    for (std::size_t c = 0; c < 6; ++c) {
      const bool acc = c < 3;
      const std::size_t axis = c % 3;
      std::vector<double> values(points);
      for (std::size_t p = 0; p < points; ++p)
        values[p] = interpolate_at(samples, *t_begin + step_ms * static_cast<double>(p), acc, axis);
      channels.emplace_back(std::move(values));
    }
    out.push_back(PickUpSignal{MultiSeries(std::move(channels), default_channel_ids()), *t_begin,
                               t_end, {}, {}});
  }
  return out;
}

DetectionStats detection_stats(std::span<const SensorTrace> traces, const ExtractParams& params) {
  DetectionStats stats;
  for (const SensorTrace& trace : traces) {
    stats.triggers += detect_triggers(trace).size();
    stats.detected += extract_pickups(trace, params).size();
  }
  if (stats.triggers == 0) {
    stats.undefined = true;
    stats.ratio = 0.0;
  } else {
    stats.ratio = static_cast<double>(stats.detected) / static_cast<double>(stats.triggers);
  }
  return stats;
}

}  // namespace pickauth::sig
