#pragma once

#include <filesystem>
#include <functional>

#include "pickauth/profile.hpp"

namespace pickauth::auth {

/// Profile store, one `#profile-v1` text file per user: key-value header
/// (user_id, theta, weights, update_count, rate, t_begin, t_end) followed by
/// the template in the trace sample-line format. Unknown versions rejected.
void save_profile(const std::filesystem::path& path, const Profile& profile);
Profile load_profile(const std::filesystem::path& path);

/// Read-modify-write under an exclusive flock on the profile file. `mutate`
/// receives the stored profile and returns the profile to persist (or the
/// input unchanged). Single writer at a time is the contract.
Profile with_locked_profile(const std::filesystem::path& path,
                            const std::function<Profile(Profile)>& mutate);

}  // namespace pickauth::auth
