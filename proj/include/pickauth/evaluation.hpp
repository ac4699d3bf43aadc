#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pickauth/batch.hpp"
#include "pickauth/profile.hpp"
#include "pickauth/series.hpp"
#include "pickauth/signal.hpp"

namespace pickauth::eval {

enum class AttackKind { RA, CAA, EA };

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& label);

/// One labeled authentication trial.
struct LabeledDistance {
  double distance = 0.0;
  bool genuine = false;
  std::optional<AttackKind> attack;
  std::string channel_subset = "all";
};

struct Rates {
  double far = 0.0;
  double frr = 0.0;
  bool far_defined = true;  // false when there were no impostor trials
  bool frr_defined = true;  // false when there were no genuine trials
};

/// far = fraction of impostor trials with d <= theta,
/// frr = fraction of genuine trials with d > theta.
Rates far_frr(std::span<const LabeledDistance> distances, double theta);

/// Fraction of all trials classified correctly at theta.
double accuracy(std::span<const LabeledDistance> distances, double theta);

struct EvalReport {
  std::vector<double> thetas;
  std::vector<double> far;
  std::vector<double> frr;
  std::vector<double> accuracy;
  bool far_defined = true;
  bool frr_defined = true;
  double chosen_theta = 0.0;  // under the default policy
};

/// FAR/FRR/accuracy curves over an ascending theta grid. FAR is
/// non-decreasing and FRR non-increasing by construction.
EvalReport sweep(std::span<const LabeledDistance> distances, const std::vector<double>& theta_grid);

/// Evenly spaced grid from 0 to the 99th percentile of all distances.
std::vector<double> default_theta_grid(std::span<const LabeledDistance> distances,
                                       std::size_t points = 200);

enum class ThresholdPolicy {
  MinFarMaxAccuracy,  // smallest theta among max-accuracy points of the min-FAR set
  TargetFrr,          // smallest theta with FRR <= target
  Eer,                // theta minimizing |FAR - FRR|
};

double choose_threshold(const EvalReport& report, ThresholdPolicy policy,
                        double target_frr = 0.1);

/// Explicit-unlock saving: detection_ratio * (1 - frr).
double unlock_reduction(double detection_ratio, double frr);

/// Builds authentication trials from labeled signals. Genuine trials are
/// leave-one-out: each held-out sample is matched against the medoid of the
/// user's remaining samples. Impostor trials match every sample against every
/// other user's full-sample medoid template. Per-channel DTW distances are
/// cached, so re-weighting (ablation, weight search) costs no further DP.
class TrialEngine {
public:
  TrialEngine(std::vector<std::pair<std::string, std::vector<sig::PickUpSignal>>> users,
              int jobs = 0);

  /// Groups a flat signal list by its user_id labels (sorted by id).
  static TrialEngine from_signals(std::span<const sig::PickUpSignal> signals, int jobs = 0);

  std::size_t user_count() const noexcept { return users_.size(); }
  const std::string& user_id(std::size_t u) const { return users_[u].first; }
  std::size_t sample_count(std::size_t u) const { return users_[u].second.size(); }
  const sig::PickUpSignal& signal(std::size_t u, std::size_t i) const {
    return users_[u].second[i];
  }

  /// Medoid sample index of user u under weights w, optionally excluding one
  /// sample (for leave-one-out trials).
  std::size_t medoid(std::size_t u, const WeightVector& w,
                     std::optional<std::size_t> exclude = std::nullopt);

  std::vector<LabeledDistance> trials(const WeightVector& w,
                                      const std::string& subset_label = "all");

  struct Separation {
    std::string user_id;
    double intra_mean = 0.0;
    double inter_mean = 0.0;
  };
  /// Mean genuine (intra) vs mean impostor (inter) trial distance per user.
  std::vector<Separation> separation(const WeightVector& w);

private:
  const batch::PairTable& intra(std::size_t u);
  std::span<const double> cross_row(std::size_t u, std::size_t tmpl, std::size_t foreign_idx);
  void fill_cross(std::size_t u, std::size_t tmpl);

  std::vector<std::pair<std::string, std::vector<sig::PickUpSignal>>> users_;
  std::vector<std::vector<sig::PickUpSignal>> foreign_;  // probes per target user
  std::vector<batch::PairTable> intra_tables_;
  std::vector<char> intra_filled_;
  std::map<std::pair<std::size_t, std::size_t>, batch::CrossTable> cross_tables_;
  int jobs_ = 0;
};

/// Weights for a channel subset named by sensor prefixes ("acc", "gyr",
/// "acc+gyr", "all"). Channels outside the subset get weight zero; sensor
/// shares follow the acc:gyr = 0.6:0.4 split renormalized over the subset,
/// uniform within each sensor.
WeightVector subset_weights(const std::vector<std::string>& channel_ids,
                            const std::string& subset_label, double acc_share = 0.6);

struct AttackSample {
  sig::PickUpSignal signal;
  std::string victim_id;
  std::optional<AttackKind> kind;  // nullopt = genuine sample of the victim
};

struct AttackReport {
  std::vector<double> thetas;
  std::vector<double> frr;  // shared: depends only on genuine distances
  std::map<AttackKind, std::vector<double>> far;
  std::map<AttackKind, std::optional<double>> largest_zero_far_theta;
};

/// Per-attack FAR curves against the shared FRR curve. Every sample is
/// matched against its victim's profile.
AttackReport attack_eval(const std::map<std::string, auth::Profile>& victims,
                         std::span<const AttackSample> samples,
                         const std::vector<double>& theta_grid);

struct SubsetResult {
  std::string label;
  double chosen_theta = 0.0;
  double accuracy = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

/// Re-evaluates the pipeline on each channel subset at that subset's own
/// chosen threshold.
std::vector<SubsetResult> subset_ablation(TrialEngine& engine,
                                          const std::vector<std::string>& subset_labels,
                                          std::size_t grid_points = 200);

struct WeightSearchResult {
  WeightVector best;
  double best_acc_share = 0.0;
  double best_accuracy = 0.0;
  std::vector<std::pair<double, double>> surface;  // (acc share, best accuracy)
};

/// Grid search over the accelerometer:gyroscope split in [0.1, 0.9],
/// uniform within each sensor; accuracy taken at each split's best theta.
/// Ties prefer the split closest to 0.5.
WeightSearchResult weight_search(TrialEngine& engine, double grid_step = 0.1);

// Tab-separated report writers (plot-ready tables).
void write_sweep_tsv(std::ostream& out, const EvalReport& report);
void write_attack_tsv(std::ostream& out, const AttackReport& report);
void write_subsets_tsv(std::ostream& out, std::span<const SubsetResult> results);
void write_weights_tsv(std::ostream& out, const WeightSearchResult& result);

}  // namespace pickauth::eval
