#pragma once

#include <filesystem>
#include <string>

#include "pickauth/datagen.hpp"
#include "pickauth/profile.hpp"
#include "pickauth/signal.hpp"

namespace pickauth {

/// Default decision threshold, calibrated on the default synthetic benchmark
/// (the min-FAR-at-max-accuracy sweep chooses 0.10 there; see the sweep
/// subcommand to recalibrate for other generator settings or real traces).
inline constexpr double kDefaultTheta = 0.10;

/// Runtime configuration: every tunable parameter with its default. Loadable
/// from a key=value text file; unknown keys are rejected.
struct Config {
  double theta = kDefaultTheta;
  double acc_share = 0.6;  // accelerometer:gyroscope weight split
  double rate_hz = 50.0;
  sig::ExtractParams extract{};
  std::size_t grid_points = 200;
  int jobs = 0;  // 0 = OpenMP default
  gen::DatasetConfig dataset{};

  WeightVector weights() const { return auth::sensor_split_weights(acc_share); }
};

/// Applies one key=value assignment; throws std::invalid_argument for
/// unknown keys or malformed values.
void config_set(Config& config, const std::string& key, const std::string& value);

/// Loads `key=value` lines ('#' comments and blank lines ignored).
Config load_config(const std::filesystem::path& path);

}  // namespace pickauth
