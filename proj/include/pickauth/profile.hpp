#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pickauth/series.hpp"
#include "pickauth/signal.hpp"

namespace pickauth::auth {

/// Stored per-user template plus decision parameters.
struct Profile {
  std::string user_id;
  sig::PickUpSignal template_signal;
  WeightVector weights;
  double theta = 0.0;
  unsigned update_count = 0;
};

struct AuthDecision {
  double distance = 0.0;
  double theta = 0.0;
  bool accepted = false;
  std::vector<double> per_channel;
};

/// Outcome of the backup explicit mechanism (password/PIN/fingerprint),
/// modeled as an opaque pass/fail flag.
struct ExplicitAuthOutcome {
  bool passed = false;
};

struct PostAuthResult {
  Profile profile;
  bool access = false;
};

/// Default 6-channel weights: accelerometer to gyroscope 0.6:0.4, uniform
/// within each sensor. acc_share must lie in (0, 1).
WeightVector sensor_split_weights(double acc_share = 0.6);

/// Builds a profile whose template is the medoid of the enrollment samples
/// under the weighted DTW distance (ties broken toward the lower index).
Profile enroll(std::string user_id, std::span<const sig::PickUpSignal> samples,
               WeightVector weights, double theta);

/// Weighted multi-dimensional DTW of candidate against the template;
/// accepted iff distance <= theta.
AuthDecision authenticate(const Profile& profile, const sig::PickUpSignal& candidate);

/// Accepted: access granted, profile untouched. Rejected: access only with a
/// passed explicit authentication, in which case the profile is updated to
/// absorb the drifted candidate.
PostAuthResult post_authenticate(const Profile& profile, const sig::PickUpSignal& candidate,
                                 const AuthDecision& decision,
                                 std::optional<ExplicitAuthOutcome> explicit_outcome);

/// Aligns each template channel with the candidate via the minimizing
/// warping path, averages the aligned pair, and resamples the result back
/// onto the template's original time base.
Profile update(const Profile& profile, const sig::PickUpSignal& candidate);

}  // namespace pickauth::auth
