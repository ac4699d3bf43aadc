#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pickauth/signal.hpp"

namespace pickauth::gen {

/// Generator knobs. Defaults are calibrated so that the synthetic population
/// overlaps: FAR and FRR are both strictly positive somewhere on the theta
/// grid rather than trivially separable.
struct GenParams {
  double rate_hz = 50.0;
  double acc_noise_sd = 0.03;   // m/s^2; rest variance stays well under epsilon_acc
  double gyr_noise_sd = 0.012;  // rad/s
  double acc_separability = 1.0;
  double gyr_separability = 0.4;
  double intra_jitter = 0.12;   // per-trace behavioral variation
  double context_shift = 0.3;   // context-specific prototype offset scale
  double drift_rate = 0.03;     // per-day random-walk step
  double mimic_skill = 0.5;     // EA blend factor toward the victim
  double flat_prefix_min_s = 1.2;
  double flat_prefix_max_s = 2.2;
  double walk_prefix_s = 4.75;  // covers the whole backtrack cap
};

inline constexpr int kComponents = 4;

struct ChannelBasis {
  double rest = 0.0;  // value while the phone lies still
  double end = 0.0;   // value at the trigger (hold orientation)
  std::array<double, kComponents> amp{};
  std::array<double, kComponents> freq{};  // cycles per motion
  std::array<double, kComponents> phase{};
};

/// Per-user motion prototype: smooth low-frequency components per channel,
/// gravity-projected rest/end orientations, and duration statistics.
struct UserMotionModel {
  std::uint64_t seed = 0;
  std::array<ChannelBasis, 6> channels{};  // acc-x..gyr-z
  double duration_mean_s = 1.6;
  double duration_sd_s = 0.25;
  double acc_noise_sd = 0.03;
  double gyr_noise_sd = 0.012;
  double drift_rate = 0.03;
};

enum class ScenarioKind { Genuine, RA, CAA, EA };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& label);

struct GenScenario {
  ScenarioKind kind = ScenarioKind::Genuine;
  int context = 0;            // 0..11: 6 places x {sitting, standing}
  bool stable_prefix = true;  // false = pick-up starts while walking
};

struct GroundTruth {
  GenScenario scenario{};
  double t_begin_ms = 0.0;  // true motion start
  double t_end_ms = 0.0;    // trigger time
};

struct GeneratedTrace {
  sig::SensorTrace trace;
  GroundTruth truth;
};

/// Deterministic model from seed. Distinct seeds spread prototypes apart by
/// the per-sensor separability scalars.
UserMotionModel make_user(std::uint64_t seed, const GenParams& params = {});

/// Random walk on prototype amplitudes, phases and end orientation over the
/// given number of simulated days.
UserMotionModel drift_user(const UserMotionModel& model, int days, std::uint64_t stream,
                           const GenParams& params = {});

/// Convex blend of two prototypes: t = 0 gives a, t = 1 gives b. Used for
/// educated attacks (mimicry).
UserMotionModel blend_models(const UserMotionModel& a, const UserMotionModel& b, double t);

/// Flat (or walking) prefix, then the prototype motion perturbed by sampled
/// duration, per-trace jitter and sensor noise, then a trigger event at the
/// motion end.
GeneratedTrace gen_pickup_trace(const UserMotionModel& model, const GenScenario& scenario,
                                std::uint64_t sample_seed, const GenParams& params = {});

/// RA: the attacker grabbing the phone in a random context, perturbed beyond
/// their own habitual variation (no knowledge at all). CAA: the attacker's
/// motion in the victim's context. EA: a convex blend of attacker and victim
/// prototypes (mimic_skill) in the victim's context.
GeneratedTrace gen_attack(const UserMotionModel& victim, const UserMotionModel& attacker,
                          ScenarioKind kind, int context, std::uint64_t sample_seed,
                          const GenParams& params = {});

struct DatasetConfig {
  int users = 24;
  int contexts = 12;
  int reps = 10;
  std::uint64_t seed = 1;
  double stable_prefix_fraction = 1.0;
  bool attacks = false;
  int victims = 6;
  int attackers = 12;
  int attack_reps = 10;
  GenParams gen{};
};

struct ManifestEntry {
  std::string filename;
  std::string user_id;  // claimed identity: the owner, or the attack victim
  std::string kind;     // genuine | RA | CAA | EA
  int context = 0;
  bool stable_prefix = true;
  double t_begin_ms = 0.0;
  double t_end_ms = 0.0;
};

/// Writes one trace file per sample plus a tab-separated manifest. Fully
/// deterministic under (seed, config): rerunning yields byte-identical
/// files. Returns the manifest path.
std::filesystem::path gen_dataset(const DatasetConfig& config,
                                  const std::filesystem::path& out_dir);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);

/// Deterministic user label for an index: u00, u01, ...
std::string user_label(int index);

/// The model gen_dataset uses for user index u, and the per-trace sample
/// seed for (user, context, rep); exposed so in-process evaluations can
/// reproduce a dataset without writing files.
UserMotionModel dataset_user_model(const DatasetConfig& config, int u);
std::uint64_t dataset_sample_seed(const DatasetConfig& config, int u, int c, int r);

}  // namespace pickauth::gen
