// Command-line frontend: dataset generation, enrollment, single-shot
// authentication, evaluation sweeps, attack analysis and latency benchmarks.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "pickauth/batch.hpp"
#include "pickauth/config.hpp"
#include "pickauth/datagen.hpp"
#include "pickauth/evaluation.hpp"
#include "pickauth/profile.hpp"
#include "pickauth/profile_io.hpp"
#include "pickauth/rng.hpp"
#include "pickauth/signal.hpp"
#include "pickauth/trace_io.hpp"

namespace {

using namespace pickauth;

struct CommonOpts {
  std::string config_file;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_file, "key=value configuration file");
  cmd->add_option("--set", opts.overrides, "override one config key (key=value, repeatable)");
}

Config resolve_config(const CommonOpts& opts) {
  Config config = opts.config_file.empty() ? Config{} : load_config(opts.config_file);
  for (const std::string& kv : opts.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    config_set(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

std::vector<sig::PickUpSignal> extract_from_file(const std::filesystem::path& path,
                                                 const Config& config) {
  const sig::SensorTrace trace = sig::read_trace_file(path);
  return sig::extract_pickups(trace, config.extract);
}

int cmd_gen(const CommonOpts& common, const std::string& out_dir) {
  Config config = resolve_config(common);
  const auto manifest = gen::gen_dataset(config.dataset, out_dir);
  const auto entries = gen::read_manifest(manifest);
  std::cout << manifest.string() << '\n';
  std::cerr << "generated " << entries.size() << " traces\n";
  return 0;
}

int cmd_enroll(const CommonOpts& common, const std::string& profile_path,
               const std::string& user_id, double theta_flag,
               const std::vector<std::string>& trace_paths) {
  Config config = resolve_config(common);
  if (theta_flag > 0.0) config.theta = theta_flag;

  std::vector<sig::PickUpSignal> samples;
  for (const std::string& path : trace_paths) {
    for (sig::PickUpSignal& s : extract_from_file(path, config)) {
      s.user_id = user_id;
      samples.push_back(std::move(s));
    }
  }
  if (samples.empty()) {
    std::cerr << "error: no pick-up signal could be extracted from the given traces\n";
    return 1;
  }
  const auto profile = auth::enroll(user_id, samples, config.weights(), config.theta);
  auth::save_profile(profile_path, profile);
  std::cout << "enrolled " << user_id << " from " << samples.size() << " sample(s), theta="
            << profile.theta << '\n';
  return 0;
}

int cmd_auth(const CommonOpts& common, const std::string& profile_path,
             const std::string& trace_path, bool explicit_pass, bool explicit_fail) {
  Config config = resolve_config(common);
  auto signals = extract_from_file(trace_path, config);
  if (signals.empty()) {
    std::cerr << "error: no pick-up signal in '" << trace_path << "'\n";
    return 1;
  }
  const sig::PickUpSignal& candidate = signals.back();  // most recent trigger
  if (signals.size() > 1)
    std::cerr << "note: " << signals.size() << " pick-ups found, using the most recent\n";

  std::optional<auth::ExplicitAuthOutcome> explicit_outcome;
  if (explicit_pass) explicit_outcome = auth::ExplicitAuthOutcome{true};
  if (explicit_fail) explicit_outcome = auth::ExplicitAuthOutcome{false};

  auth::AuthDecision decision;
  bool access = false;
  auth::with_locked_profile(profile_path, [&](auth::Profile stored) {
    decision = auth::authenticate(stored, candidate);
    auto result = auth::post_authenticate(stored, candidate, decision, explicit_outcome);
    access = result.access;
    return result.profile;
  });

  std::printf("distance=%.9g theta=%.9g decision=%s access=%s\n", decision.distance,
              decision.theta, decision.accepted ? "accept" : "reject", access ? "yes" : "no");
  return access ? 0 : 2;
}

struct LoadedDataset {
  std::vector<sig::PickUpSignal> genuine;
  std::vector<eval::AttackSample> attack_samples;  // genuine victims + attacks
  std::set<std::string> victim_ids;
  sig::DetectionStats stats;
};

LoadedDataset load_dataset(const std::filesystem::path& manifest_path, const Config& config) {
  LoadedDataset data;
  const auto entries = gen::read_manifest(manifest_path);
  const auto base = manifest_path.parent_path();
  std::size_t triggers = 0, detected = 0;
  for (const gen::ManifestEntry& e : entries) {
    const auto signals = extract_from_file(base / e.filename, config);
    if (e.kind == "genuine") {
      triggers += 1;
      detected += signals.empty() ? 0 : 1;
    }
    for (sig::PickUpSignal s : signals) {
      s.user_id = e.user_id;
      s.context = std::to_string(e.context);
      if (e.kind == "genuine") {
        data.genuine.push_back(std::move(s));
      } else {
        data.victim_ids.insert(e.user_id);
        data.attack_samples.push_back(
            eval::AttackSample{std::move(s), e.user_id, eval::attack_kind_from_string(e.kind)});
      }
    }
  }
  data.stats.triggers = triggers;
  data.stats.detected = detected;
  data.stats.undefined = triggers == 0;
  data.stats.ratio = triggers ? static_cast<double>(detected) / static_cast<double>(triggers) : 0.0;
  return data;
}

int cmd_sweep(const CommonOpts& common, const std::string& manifest_path,
              const std::string& out_dir, bool with_attacks, bool with_ablation,
              bool with_weights, int jobs_flag) {
  Config config = resolve_config(common);
  if (jobs_flag > 0) config.jobs = jobs_flag;

  std::filesystem::create_directories(out_dir);
  const LoadedDataset data = load_dataset(manifest_path, config);
  if (data.genuine.empty()) {
    std::cerr << "error: no genuine pick-up signals in the dataset\n";
    return 1;
  }

  eval::TrialEngine engine = eval::TrialEngine::from_signals(data.genuine, config.jobs);
  const WeightVector weights = config.weights();
  const auto trials = engine.trials(weights);
  const auto grid = eval::default_theta_grid(trials, config.grid_points);
  const eval::EvalReport report = eval::sweep(trials, grid);
  const double theta = report.chosen_theta;
  const eval::Rates rates = eval::far_frr(trials, theta);
  const double acc = eval::accuracy(trials, theta);
  const double reduction =
      data.stats.undefined ? 0.0 : eval::unlock_reduction(data.stats.ratio, rates.frr);

  {
    std::ofstream out(std::filesystem::path(out_dir) / "sweep.tsv");
    eval::write_sweep_tsv(out, report);
  }

  std::ostringstream summary;
  summary << "signals\t" << data.genuine.size() << '\n';
  summary << "detection_ratio\t" << data.stats.ratio << (data.stats.undefined ? "\t(no triggers)" : "")
          << '\n';
  summary << "chosen_theta\t" << theta << '\n';
  summary << "accuracy\t" << acc << '\n';
  summary << "far\t" << rates.far << '\n';
  summary << "frr\t" << rates.frr << '\n';
  summary << "unlock_reduction\t" << reduction << '\n';

  if (with_attacks) {
    if (data.attack_samples.empty()) {
      std::cerr << "error: --attacks requested but the manifest has no attack entries\n";
      return 1;
    }
    std::map<std::string, auth::Profile> victims;
    std::vector<eval::AttackSample> samples = data.attack_samples;
    for (const std::string& victim : data.victim_ids) {
      std::vector<sig::PickUpSignal> own;
      for (const sig::PickUpSignal& s : data.genuine)
        if (s.user_id == victim) own.push_back(s);
      if (own.empty()) {
        std::cerr << "error: victim '" << victim << "' has no genuine signals\n";
        return 1;
      }
      auth::Profile profile = auth::enroll(victim, own, weights, theta);
      // Genuine probes for the shared FRR curve; the template itself is left out.
      for (const sig::PickUpSignal& s : own)
        if (!(s.signal == profile.template_signal.signal))
          samples.push_back(eval::AttackSample{s, victim, std::nullopt});
      victims.emplace(victim, std::move(profile));
    }
    const eval::AttackReport attack_report = eval::attack_eval(victims, samples, grid);
    std::ofstream out(std::filesystem::path(out_dir) / "attacks.tsv");
    eval::write_attack_tsv(out, attack_report);
    for (const auto& [kind, theta_star] : attack_report.largest_zero_far_theta) {
      summary << "attack_" << eval::to_string(kind) << "_max_theta_zero_far\t";
      if (theta_star) {
        summary << *theta_star;
      } else {
        summary << "none";
      }
      summary << '\n';
    }
  }

  if (with_ablation) {
    const auto results = eval::subset_ablation(engine, {"acc", "gyr", "acc+gyr"},
                                               config.grid_points);
    std::ofstream out(std::filesystem::path(out_dir) / "ablation.tsv");
    eval::write_subsets_tsv(out, results);
    for (const auto& r : results)
      summary << "subset_" << r.label << "_accuracy\t" << r.accuracy << '\n';
  }

  if (with_weights) {
    const auto result = eval::weight_search(engine);
    std::ofstream out(std::filesystem::path(out_dir) / "weights.tsv");
    eval::write_weights_tsv(out, result);
    summary << "best_acc_share\t" << result.best_acc_share << '\n';
    summary << "best_acc_share_accuracy\t" << result.best_accuracy << '\n';
  }

  {
    std::ofstream out(std::filesystem::path(out_dir) / "summary.txt");
    out << summary.str();
  }
  std::cout << summary.str();
  return 0;
}

sig::PickUpSignal random_signal(Rng& rng, std::size_t length) {
  std::vector<Series> channels;
  for (std::size_t c = 0; c < 6; ++c) {
    std::vector<double> v(length);
    double walk = rng.uniform(-1, 1);
    for (double& x : v) {
      walk += rng.uniform(-0.3, 0.3);
      x = walk;
    }
    channels.emplace_back(std::move(v));
  }
  const double duration_ms = static_cast<double>(length - 1) / 50.0 * 1000.0;
  return sig::PickUpSignal{MultiSeries(std::move(channels), sig::default_channel_ids()), 0.0,
                           duration_ms, "bench", {}};
}

int cmd_bench(const CommonOpts& common, std::vector<std::size_t> lengths, std::size_t reps) {
  Config config = resolve_config(common);
  if (reps == 0) {
    std::cerr << "error: --reps must be positive\n";
    return 1;
  }
  if (lengths.empty()) lengths = {25, 50, 100, 200};

  std::printf("%8s %12s %12s\n", "length", "median_ms", "p99_ms");
  for (std::size_t length : lengths) {
    Rng rng(mix_seed(4242, {length}));
    const sig::PickUpSignal tmpl = random_signal(rng, length);
    const sig::PickUpSignal candidate = random_signal(rng, length);
    const auth::Profile profile{"bench", tmpl, config.weights(), 1.0, 0};

    for (int warm = 0; warm < 3; ++warm) auth::authenticate(profile, candidate);

    std::vector<double> ms(reps);
    volatile double sink = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto decision = auth::authenticate(profile, candidate);
      const auto t1 = std::chrono::steady_clock::now();
      sink = sink + decision.distance;
      ms[r] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    std::sort(ms.begin(), ms.end());
    const double median = ms[ms.size() / 2];
    const std::size_t p99_idx =
        std::min(ms.size() - 1,
                 static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(ms.size()))) - 1);
    std::printf("%8zu %12.4f %12.4f\n", length, median, ms[p99_idx]);
  }
  return 0;
}

eval::EvalReport read_sweep_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  eval::EvalReport report;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double theta = 0, far = 0, frr = 0, acc = 0;
    if (std::sscanf(line.c_str(), "%lf\t%lf\t%lf\t%lf", &theta, &far, &frr, &acc) != 4)
      throw std::runtime_error("malformed sweep row: " + line);
    report.thetas.push_back(theta);
    report.far.push_back(far);
    report.frr.push_back(frr);
    report.accuracy.push_back(acc);
  }
  if (report.thetas.empty()) throw std::runtime_error("empty sweep table");
  return report;
}

int cmd_report(const std::string& report_dir, const std::string& policy_name, double target_frr) {
  const auto dir = std::filesystem::path(report_dir);
  const eval::EvalReport report = read_sweep_tsv(dir / "sweep.tsv");

  eval::ThresholdPolicy policy = eval::ThresholdPolicy::MinFarMaxAccuracy;
  if (policy_name == "target-frr") {
    policy = eval::ThresholdPolicy::TargetFrr;
  } else if (policy_name == "eer") {
    policy = eval::ThresholdPolicy::Eer;
  } else if (policy_name != "min-far") {
    std::cerr << "error: unknown policy '" << policy_name << "'\n";
    return 1;
  }
  const double theta = eval::choose_threshold(report, policy, target_frr);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < report.thetas.size(); ++i)
    if (report.thetas[i] == theta) idx = i;

  std::printf("policy=%s theta=%.9g\n", policy_name.c_str(), theta);
  std::printf("far=%.4f frr=%.4f accuracy=%.4f\n", report.far[idx], report.frr[idx],
              report.accuracy[idx]);

  if (std::filesystem::exists(dir / "summary.txt")) {
    std::ifstream in(dir / "summary.txt");
    std::cout << "--- stored summary ---\n" << in.rdbuf();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pick-up motion authentication toolkit"};
  app.require_subcommand(1);

  CommonOpts gen_common, enroll_common, auth_common, sweep_common, bench_common;

  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic labeled dataset");
  std::string gen_out;
  gen_cmd->add_option("--out", gen_out, "output directory")->required();
  add_common(gen_cmd, gen_common);
  // convenience aliases for the most common dataset knobs
  std::map<std::string, std::string> gen_aliases{
      {"--users", "gen.users"},         {"--contexts", "gen.contexts"},
      {"--reps", "gen.reps"},           {"--seed", "gen.seed"},
      {"--stable-fraction", "gen.stable_fraction"}, {"--victims", "gen.victims"},
      {"--attackers", "gen.attackers"}, {"--attack-reps", "gen.attack_reps"}};
  std::map<std::string, std::string> gen_alias_values;
  for (const auto& [flag, key] : gen_aliases)
    gen_cmd->add_option(flag, gen_alias_values[flag], "shorthand for --set " + key + "=V");
  bool gen_attacks = false;
  gen_cmd->add_flag("--attacks", gen_attacks, "also generate RA/CAA/EA attack traces");

  auto* enroll_cmd = app.add_subcommand("enroll", "build a profile from traces");
  std::string enroll_profile, enroll_user;
  double enroll_theta = 0.0;
  std::vector<std::string> enroll_traces;
  enroll_cmd->add_option("--profile", enroll_profile, "profile output path")->required();
  enroll_cmd->add_option("--user", enroll_user, "user id")->required();
  enroll_cmd->add_option("--theta", enroll_theta, "decision threshold");
  enroll_cmd->add_option("traces", enroll_traces, "trace files")->required();
  add_common(enroll_cmd, enroll_common);

  auto* auth_cmd = app.add_subcommand("auth", "authenticate one trace against a profile");
  std::string auth_profile, auth_trace;
  bool explicit_pass = false, explicit_fail = false;
  auth_cmd->add_option("--profile", auth_profile, "profile path")->required();
  auth_cmd->add_option("trace", auth_trace, "trace file")->required();
  auth_cmd->add_flag("--explicit-pass", explicit_pass, "explicit authentication succeeded");
  auth_cmd->add_flag("--explicit-fail", explicit_fail, "explicit authentication failed");
  add_common(auth_cmd, auth_common);

  auto* sweep_cmd = app.add_subcommand("sweep", "run the evaluation pipeline on a dataset");
  std::string sweep_manifest, sweep_out;
  bool sweep_attacks = false, sweep_ablation = false, sweep_weights = false;
  int sweep_jobs = 0;
  sweep_cmd->add_option("--manifest", sweep_manifest, "dataset manifest")->required();
  sweep_cmd->add_option("--out", sweep_out, "report output directory")->required();
  sweep_cmd->add_flag("--attacks", sweep_attacks, "per-attack FAR/FRR curves");
  sweep_cmd->add_flag("--ablation", sweep_ablation, "sensor-subset ablation");
  sweep_cmd->add_flag("--weight-search", sweep_weights, "acc:gyr weight grid search");
  sweep_cmd->add_option("--jobs", sweep_jobs, "worker threads (0 = default)");
  add_common(sweep_cmd, sweep_common);

  auto* bench_cmd = app.add_subcommand("bench", "authentication latency benchmark");
  std::vector<std::size_t> bench_lengths;
  std::size_t bench_reps = 200;
  bench_cmd->add_option("--lengths", bench_lengths, "signal lengths to time");
  bench_cmd->add_option("--reps", bench_reps, "repetitions per length");
  add_common(bench_cmd, bench_common);

  auto* report_cmd = app.add_subcommand("report", "summarize a sweep report directory");
  std::string report_dir, report_policy = "min-far";
  double report_target_frr = 0.1;
  report_cmd->add_option("dir", report_dir, "report directory")->required();
  report_cmd->add_option("--policy", report_policy, "min-far | target-frr | eer");
  report_cmd->add_option("--target-frr", report_target_frr, "target for the target-frr policy");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      for (const auto& [flag, key] : gen_aliases)
        if (!gen_alias_values[flag].empty())
          gen_common.overrides.push_back(key + "=" + gen_alias_values[flag]);
      if (gen_attacks) gen_common.overrides.push_back("gen.attacks=1");
      return cmd_gen(gen_common, gen_out);
    }
    if (enroll_cmd->parsed())
      return cmd_enroll(enroll_common, enroll_profile, enroll_user, enroll_theta, enroll_traces);
    if (auth_cmd->parsed()) {
      if (explicit_pass && explicit_fail) {
        std::cerr << "error: --explicit-pass and --explicit-fail are mutually exclusive\n";
        return 1;
      }
      return cmd_auth(auth_common, auth_profile, auth_trace, explicit_pass, explicit_fail);
    }
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_common, sweep_manifest, sweep_out, sweep_attacks, sweep_ablation,
                       sweep_weights, sweep_jobs);
    if (bench_cmd->parsed()) return cmd_bench(bench_common, bench_lengths, bench_reps);
    if (report_cmd->parsed()) return cmd_report(report_dir, report_policy, report_target_frr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
