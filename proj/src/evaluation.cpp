#include "pickauth/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace pickauth::eval {

namespace {

std::string tsv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Sorted genuine / impostor distances for O(log n) counting per theta.
struct SplitDistances {
  std::vector<double> genuine;
  std::vector<double> impostor;

  explicit SplitDistances(std::span<const LabeledDistance> distances) {
    for (const LabeledDistance& d : distances) {
      if (d.distance < 0.0) throw std::invalid_argument("evaluation: negative distance");
      (d.genuine ? genuine : impostor).push_back(d.distance);
    }
    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());
  }

  static std::size_t accepted(const std::vector<double>& v, double theta) {
    return std::upper_bound(v.begin(), v.end(), theta) - v.begin();
  }
};

Rates rates_at(const SplitDistances& split, double theta) {
  Rates r;
  if (split.impostor.empty()) {
    r.far_defined = false;
  } else {
    r.far = static_cast<double>(SplitDistances::accepted(split.impostor, theta)) /
            static_cast<double>(split.impostor.size());
  }
  if (split.genuine.empty()) {
    r.frr_defined = false;
  } else {
    const std::size_t rejected =
        split.genuine.size() - SplitDistances::accepted(split.genuine, theta);
    r.frr = static_cast<double>(rejected) / static_cast<double>(split.genuine.size());
  }
  return r;
}

double accuracy_at(const SplitDistances& split, double theta) {
  const std::size_t total = split.genuine.size() + split.impostor.size();
  if (total == 0) throw std::invalid_argument("accuracy: no trials");
  const std::size_t correct = SplitDistances::accepted(split.genuine, theta) +
                              (split.impostor.size() - SplitDistances::accepted(split.impostor, theta));
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::RA: return "RA";
    case AttackKind::CAA: return "CAA";
    case AttackKind::EA: return "EA";
  }
  return "?";
}

AttackKind attack_kind_from_string(const std::string& label) {
  if (label == "RA") return AttackKind::RA;
  if (label == "CAA") return AttackKind::CAA;
  if (label == "EA") return AttackKind::EA;
  throw std::invalid_argument("unknown attack kind '" + label + "'");
}

Rates far_frr(std::span<const LabeledDistance> distances, double theta) {
  return rates_at(SplitDistances(distances), theta);
}

double accuracy(std::span<const LabeledDistance> distances, double theta) {
  return accuracy_at(SplitDistances(distances), theta);
}

EvalReport sweep(std::span<const LabeledDistance> distances, const std::vector<double>& theta_grid) {
  if (theta_grid.empty()) throw std::invalid_argument("sweep: empty theta grid");
  if (!std::is_sorted(theta_grid.begin(), theta_grid.end()))
    throw std::invalid_argument("sweep: theta grid must be sorted ascending");

  const SplitDistances split(distances);
  EvalReport report;
  report.thetas = theta_grid;
  report.far.reserve(theta_grid.size());
  report.frr.reserve(theta_grid.size());
  report.accuracy.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    const Rates r = rates_at(split, theta);
    report.far.push_back(r.far);
    report.frr.push_back(r.frr);
    report.accuracy.push_back(accuracy_at(split, theta));
    report.far_defined = r.far_defined;
    report.frr_defined = r.frr_defined;
  }
  report.chosen_theta = choose_threshold(report, ThresholdPolicy::MinFarMaxAccuracy);
  return report;
}

std::vector<double> default_theta_grid(std::span<const LabeledDistance> distances,
                                       std::size_t points) {
  if (points < 2) throw std::invalid_argument("default_theta_grid: need at least 2 points");
  std::vector<double> all;
  all.reserve(distances.size());
  for (const LabeledDistance& d : distances) all.push_back(d.distance);
  if (all.empty()) throw std::invalid_argument("default_theta_grid: no distances");
  std::sort(all.begin(), all.end());
  const std::size_t idx =
      static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(all.size()))) - 1;
  const double hi = std::max(all[std::min(idx, all.size() - 1)], 1e-9);
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = hi * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

double choose_threshold(const EvalReport& report, ThresholdPolicy policy, double target_frr) {
  if (report.thetas.empty()) throw std::invalid_argument("choose_threshold: empty report");
  const std::size_t n = report.thetas.size();
  switch (policy) {
    case ThresholdPolicy::MinFarMaxAccuracy: {
      double min_far = *std::min_element(report.far.begin(), report.far.end());
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (report.far[i] != min_far) continue;
        if (best == n || report.accuracy[i] > report.accuracy[best]) best = i;
      }
      return report.thetas[best];
    }
    case ThresholdPolicy::TargetFrr: {
      for (std::size_t i = 0; i < n; ++i)
        if (report.frr[i] <= target_frr) return report.thetas[i];
      return report.thetas.back();
    }
    case ThresholdPolicy::Eer: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::abs(report.far[i] - report.frr[i]) < std::abs(report.far[best] - report.frr[best]))
          best = i;
      return report.thetas[best];
    }
  }
  throw std::invalid_argument("choose_threshold: unknown policy");
}

double unlock_reduction(double detection_ratio, double frr) {
  if (!(detection_ratio >= 0.0 && detection_ratio <= 1.0))
    throw std::invalid_argument("unlock_reduction: detection ratio out of [0,1]");
  if (!(frr >= 0.0 && frr <= 1.0))
    throw std::invalid_argument("unlock_reduction: frr out of [0,1]");
  return detection_ratio * (1.0 - frr);
}

TrialEngine::TrialEngine(std::vector<std::pair<std::string, std::vector<sig::PickUpSignal>>> users,
                         int jobs)
    : users_(std::move(users)), jobs_(jobs) {
  if (users_.empty()) throw std::invalid_argument("TrialEngine: no users");
  std::set<std::string> ids;
  for (const auto& [id, signals] : users_) {
    if (signals.empty()) throw std::invalid_argument("TrialEngine: user '" + id + "' has no signals");
    if (!ids.insert(id).second)
      throw std::invalid_argument("TrialEngine: duplicate user '" + id + "'");
  }
  intra_tables_.resize(users_.size());
  intra_filled_.assign(users_.size(), 0);
  foreign_.resize(users_.size());
  for (std::size_t u = 0; u < users_.size(); ++u) {
    for (std::size_t v = 0; v < users_.size(); ++v) {
      if (v == u) continue;
      for (const sig::PickUpSignal& s : users_[v].second) foreign_[u].push_back(s);
    }
  }
}

TrialEngine TrialEngine::from_signals(std::span<const sig::PickUpSignal> signals, int jobs) {
  std::map<std::string, std::vector<sig::PickUpSignal>> grouped;
  for (const sig::PickUpSignal& s : signals) grouped[s.user_id].push_back(s);
  std::vector<std::pair<std::string, std::vector<sig::PickUpSignal>>> users;
  users.reserve(grouped.size());
  for (auto& [id, sigs] : grouped) users.emplace_back(id, std::move(sigs));
  return TrialEngine(std::move(users), jobs);
}

const batch::PairTable& TrialEngine::intra(std::size_t u) {
  if (!intra_filled_[u]) {
    intra_tables_[u] = batch::pairwise_table_parallel(users_[u].second, jobs_);
    intra_filled_[u] = 1;
  }
  return intra_tables_[u];
}

void TrialEngine::fill_cross(std::size_t u, std::size_t tmpl) {
  const auto key = std::make_pair(u, tmpl);
  if (cross_tables_.contains(key)) return;
  const sig::PickUpSignal& reference = users_[u].second[tmpl];
  cross_tables_.emplace(key, batch::cross_table_parallel(
                                 foreign_[u], std::span<const sig::PickUpSignal>(&reference, 1),
                                 jobs_));
}

std::span<const double> TrialEngine::cross_row(std::size_t u, std::size_t tmpl,
                                               std::size_t foreign_idx) {
  return cross_tables_.at({u, tmpl}).at(foreign_idx, 0);
}

std::size_t TrialEngine::medoid(std::size_t u, const WeightVector& w,
                                std::optional<std::size_t> exclude) {
  const std::size_t n = users_[u].second.size();
  if (n == 1) return 0;
  const batch::PairTable& table = intra(u);
  std::size_t best = n;
  double best_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (exclude && *exclude == i) continue;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || (exclude && *exclude == j)) continue;
      sum += batch::combine(table.at(i, j), w);
    }
    if (best == n || sum < best_sum) {
      best = i;
      best_sum = sum;
    }
  }
  return best;
}

std::vector<LabeledDistance> TrialEngine::trials(const WeightVector& w,
                                                 const std::string& subset_label) {
  std::vector<LabeledDistance> out;
  for (std::size_t u = 0; u < users_.size(); ++u) {
    const std::size_t n = users_[u].second.size();
    if (n >= 2) {
      const batch::PairTable& table = intra(u);
      for (std::size_t holdout = 0; holdout < n; ++holdout) {
        const std::size_t tmpl = medoid(u, w, holdout);
        out.push_back(LabeledDistance{batch::combine(table.at(tmpl, holdout), w), true,
                                      std::nullopt, subset_label});
      }
    }
    if (!foreign_[u].empty()) {
      const std::size_t tmpl = medoid(u, w);
      fill_cross(u, tmpl);
      for (std::size_t p = 0; p < foreign_[u].size(); ++p)
        out.push_back(LabeledDistance{batch::combine(cross_row(u, tmpl, p), w), false,
                                      std::nullopt, subset_label});
    }
  }
  return out;
}

std::vector<TrialEngine::Separation> TrialEngine::separation(const WeightVector& w) {
  std::vector<Separation> out;
  for (std::size_t u = 0; u < users_.size(); ++u) {
    Separation sep;
    sep.user_id = users_[u].first;
    const std::size_t n = users_[u].second.size();
    double intra_sum = 0.0;
    std::size_t intra_count = 0;
    if (n >= 2) {
      const batch::PairTable& table = intra(u);
      for (std::size_t holdout = 0; holdout < n; ++holdout) {
        const std::size_t tmpl = medoid(u, w, holdout);
        intra_sum += batch::combine(table.at(tmpl, holdout), w);
        ++intra_count;
      }
    }
    double inter_sum = 0.0;
    std::size_t inter_count = 0;
    if (!foreign_[u].empty()) {
      const std::size_t tmpl = medoid(u, w);
      fill_cross(u, tmpl);
      for (std::size_t p = 0; p < foreign_[u].size(); ++p) {
        inter_sum += batch::combine(cross_row(u, tmpl, p), w);
        ++inter_count;
      }
    }
    sep.intra_mean = intra_count ? intra_sum / static_cast<double>(intra_count) : 0.0;
    sep.inter_mean = inter_count ? inter_sum / static_cast<double>(inter_count) : 0.0;
    out.push_back(std::move(sep));
  }
  return out;
}

WeightVector subset_weights(const std::vector<std::string>& channel_ids,
                            const std::string& subset_label, double acc_share) {
  std::vector<std::string> sensors;
  if (subset_label == "all") {
    std::set<std::string> seen;
    for (const std::string& id : channel_ids) {
      const std::string sensor = id.substr(0, id.find('-'));
      if (seen.insert(sensor).second) sensors.push_back(sensor);
    }
  } else {
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = subset_label.find('+', start);
      sensors.push_back(subset_label.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
  }
  if (sensors.empty()) throw std::invalid_argument("subset_weights: empty subset");

  // Sensor shares: acc gets acc_share, everything else splits the rest
  // evenly; renormalized over the sensors actually present.
  std::map<std::string, double> share;
  double total = 0.0;
  const bool has_acc = std::find(sensors.begin(), sensors.end(), "acc") != sensors.end();
  for (const std::string& s : sensors) {
    const double base = s == "acc" ? acc_share
                        : has_acc ? (1.0 - acc_share) / static_cast<double>(sensors.size() - 1)
                                  : 1.0 / static_cast<double>(sensors.size());
    share[s] = base;
    total += base;
  }

  std::vector<double> weights(channel_ids.size(), 0.0);
  std::map<std::string, std::size_t> counts;
  for (const std::string& id : channel_ids) counts[id.substr(0, id.find('-'))]++;
  for (const std::string& s : sensors) {
    if (!counts.contains(s))
      throw std::invalid_argument("subset_weights: no channels for sensor '" + s + "'");
  }
  for (std::size_t c = 0; c < channel_ids.size(); ++c) {
    const std::string sensor = channel_ids[c].substr(0, channel_ids[c].find('-'));
    const auto it = share.find(sensor);
    if (it == share.end()) continue;
    weights[c] = it->second / total / static_cast<double>(counts[sensor]);
  }
  return WeightVector(std::move(weights));
}

AttackReport attack_eval(const std::map<std::string, auth::Profile>& victims,
                         std::span<const AttackSample> samples,
                         const std::vector<double>& theta_grid) {
  if (theta_grid.empty() || !std::is_sorted(theta_grid.begin(), theta_grid.end()))
    throw std::invalid_argument("attack_eval: theta grid must be non-empty and sorted");

  std::vector<double> genuine;
  std::map<AttackKind, std::vector<double>> attack;
  for (const AttackSample& s : samples) {
    const auto it = victims.find(s.victim_id);
    if (it == victims.end())
      throw std::invalid_argument("attack_eval: no profile for victim '" + s.victim_id + "'");
    const double d = auth::authenticate(it->second, s.signal).distance;
    if (s.kind) {
      attack[*s.kind].push_back(d);
    } else {
      genuine.push_back(d);
    }
  }
  std::sort(genuine.begin(), genuine.end());
  for (auto& [kind, v] : attack) std::sort(v.begin(), v.end());

  AttackReport report;
  report.thetas = theta_grid;
  report.frr.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    if (genuine.empty()) {
      report.frr.push_back(0.0);
      continue;
    }
    const auto accepted = static_cast<std::size_t>(
        std::upper_bound(genuine.begin(), genuine.end(), theta) - genuine.begin());
    report.frr.push_back(static_cast<double>(genuine.size() - accepted) /
                         static_cast<double>(genuine.size()));
  }
  for (const auto& [kind, v] : attack) {
    std::vector<double> far;
    far.reserve(theta_grid.size());
    std::optional<double> zero_theta;
    for (double theta : theta_grid) {
      const double rate = static_cast<double>(std::upper_bound(v.begin(), v.end(), theta) - v.begin()) /
                          static_cast<double>(v.size());
      far.push_back(rate);
      if (rate == 0.0) zero_theta = theta;
    }
    report.far[kind] = std::move(far);
    report.largest_zero_far_theta[kind] = zero_theta;
  }
  return report;
}

std::vector<SubsetResult> subset_ablation(TrialEngine& engine,
                                          const std::vector<std::string>& subset_labels,
                                          std::size_t grid_points) {
  if (subset_labels.empty()) throw std::invalid_argument("subset_ablation: no subsets");
  const auto& channel_ids = engine.signal(0, 0).signal.channel_ids();
  std::vector<SubsetResult> out;
  for (const std::string& label : subset_labels) {
    const WeightVector w = subset_weights(channel_ids, label);
    const auto distances = engine.trials(w, label);
    const auto grid = default_theta_grid(distances, grid_points);
    const EvalReport report = sweep(distances, grid);
    const double theta = report.chosen_theta;
    const Rates r = far_frr(distances, theta);
    out.push_back(SubsetResult{label, theta, accuracy(distances, theta), r.far, r.frr});
  }
  return out;
}

WeightSearchResult weight_search(TrialEngine& engine, double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("weight_search: step must be positive");
  const double steps = 0.8 / grid_step;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw std::invalid_argument("weight_search: step must divide the [0.1, 0.9] range");
  const auto& channel_ids = engine.signal(0, 0).signal.channel_ids();

  std::vector<std::pair<double, double>> surface;
  for (double share = 0.1; share <= 0.9 + 1e-12; share += grid_step) {
    const WeightVector w = subset_weights(channel_ids, "all", share);
    const auto distances = engine.trials(w, "all");
    const auto grid = default_theta_grid(distances);
    const EvalReport report = sweep(distances, grid);
    const double best_acc = *std::max_element(report.accuracy.begin(), report.accuracy.end());
    surface.emplace_back(share, best_acc);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < surface.size(); ++i) {
    const auto& [share, acc] = surface[i];
    const auto& [bshare, bacc] = surface[best];
    if (acc > bacc ||
        (acc == bacc && std::abs(share - 0.5) < std::abs(bshare - 0.5)))
      best = i;
  }
  return WeightSearchResult{subset_weights(channel_ids, "all", surface[best].first),
                            surface[best].first, surface[best].second, surface};
}

void write_sweep_tsv(std::ostream& out, const EvalReport& report) {
  out << "theta\tfar\tfrr\taccuracy\n";
  for (std::size_t i = 0; i < report.thetas.size(); ++i)
    out << tsv_num(report.thetas[i]) << '\t' << tsv_num(report.far[i]) << '\t'
        << tsv_num(report.frr[i]) << '\t' << tsv_num(report.accuracy[i]) << '\n';
}

void write_attack_tsv(std::ostream& out, const AttackReport& report) {
  out << "theta\tfrr";
  for (const auto& [kind, far] : report.far) out << "\tfar_" << to_string(kind);
  out << '\n';
  for (std::size_t i = 0; i < report.thetas.size(); ++i) {
    out << tsv_num(report.thetas[i]) << '\t' << tsv_num(report.frr[i]);
    for (const auto& [kind, far] : report.far) out << '\t' << tsv_num(far[i]);
    out << '\n';
  }
}

void write_subsets_tsv(std::ostream& out, std::span<const SubsetResult> results) {
  out << "subset\ttheta\taccuracy\tfar\tfrr\n";
  for (const SubsetResult& r : results)
    out << r.label << '\t' << tsv_num(r.chosen_theta) << '\t' << tsv_num(r.accuracy) << '\t'
        << tsv_num(r.far) << '\t' << tsv_num(r.frr) << '\n';
}

void write_weights_tsv(std::ostream& out, const WeightSearchResult& result) {
  out << "acc_share\tbest_accuracy\n";
  for (const auto& [share, acc] : result.surface)
    out << tsv_num(share) << '\t' << tsv_num(acc) << '\n';
}

}  // namespace pickauth::eval
