#include "pickauth/profile.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pickauth/dtw.hpp"

namespace pickauth::auth {

namespace {

// Linear resample of a series interpreted as uniform over [0, 1].
Series resample_to(const Series& s, std::size_t points) {
  if (points < 2) throw std::invalid_argument("resample_to: need at least two points");
  if (s.size() == points) return s;
  std::vector<double> out(points);
  const double scale = static_cast<double>(s.size() - 1) / static_cast<double>(points - 1);
  for (std::size_t p = 0; p < points; ++p) {
    const double u = static_cast<double>(p) * scale;
    const std::size_t i = std::min(static_cast<std::size_t>(u), s.size() - 2);
    const double f = u - static_cast<double>(i);
    out[p] = s[i] + f * (s[i + 1] - s[i]);
  }
  return Series(std::move(out));
}

}  // namespace

WeightVector sensor_split_weights(double acc_share) {
  if (!(acc_share > 0.0) || !(acc_share < 1.0))
    throw std::invalid_argument("sensor_split_weights: acc share must be in (0, 1)");
  const double acc = acc_share / 3.0;
  const double gyr = (1.0 - acc_share) / 3.0;
  return WeightVector({acc, acc, acc, gyr, gyr, gyr});
}

Profile enroll(std::string user_id, std::span<const sig::PickUpSignal> samples,
               WeightVector weights, double theta) {
  if (samples.empty()) throw std::invalid_argument("enroll: no samples");
  if (!(theta > 0.0)) throw std::invalid_argument("enroll: theta must be positive");
  for (const sig::PickUpSignal& s : samples) {
    if (s.signal.channel_ids() != samples.front().signal.channel_ids())
      throw std::invalid_argument("enroll: samples have mismatched channels");
  }
  if (weights.size() != samples.front().signal.channel_count())
    throw std::invalid_argument("enroll: weight/channel arity mismatch");

  std::size_t medoid = 0;
  if (samples.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < samples.size(); ++j) {
        if (i == j) continue;
        sum += dtw::dtw_multi_weighted(samples[i].signal, samples[j].signal, weights).distance;
      }
      if (sum < best) {
        best = sum;
        medoid = i;
      }
    }
  }
  return Profile{std::move(user_id), samples[medoid], std::move(weights), theta, 0};
}

AuthDecision authenticate(const Profile& profile, const sig::PickUpSignal& candidate) {
  const auto r =
      dtw::dtw_multi_weighted(profile.template_signal.signal, candidate.signal, profile.weights);
  AuthDecision decision;
  decision.distance = r.distance;
  decision.theta = profile.theta;
  decision.accepted = r.distance <= profile.theta;
  decision.per_channel = r.per_channel;
  return decision;
}

PostAuthResult post_authenticate(const Profile& profile, const sig::PickUpSignal& candidate,
                                 const AuthDecision& decision,
                                 std::optional<ExplicitAuthOutcome> explicit_outcome) {
  if (decision.accepted) return PostAuthResult{profile, true};
  if (explicit_outcome && explicit_outcome->passed)
    return PostAuthResult{update(profile, candidate), true};
  return PostAuthResult{profile, false};
}

Profile update(const Profile& profile, const sig::PickUpSignal& candidate) {
  const MultiSeries& tmpl = profile.template_signal.signal;
  if (tmpl.channel_ids() != candidate.signal.channel_ids())
    throw std::invalid_argument("update: candidate channels do not match the template");

  const std::size_t points = tmpl.length();
  std::vector<Series> updated;
  updated.reserve(tmpl.channel_count());
  for (std::size_t c = 0; c < tmpl.channel_count(); ++c) {
    const auto r = dtw::dtw_1d(tmpl.channel(c), candidate.signal.channel(c), true);
    const auto [a, b] = dtw::align(tmpl.channel(c), candidate.signal.channel(c), *r.path);
    std::vector<double> avg(a.size());
    for (std::size_t l = 0; l < a.size(); ++l) avg[l] = 0.5 * (a[l] + b[l]);
    updated.push_back(resample_to(Series(std::move(avg)), points));
  }

  Profile out = profile;
  out.template_signal.signal = MultiSeries(std::move(updated), tmpl.channel_ids());
  out.update_count += 1;
  return out;
}

}  // namespace pickauth::auth
