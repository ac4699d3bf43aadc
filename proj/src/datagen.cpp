#include "pickauth/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pickauth/rng.hpp"
#include "pickauth/trace_io.hpp"

namespace pickauth::gen {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kGravity = 9.81;

// Stream tags for seed mixing; arbitrary distinct constants.
constexpr std::uint64_t kUserStream = 0x75736572;
constexpr std::uint64_t kTraceStream = 0x74726163;
constexpr std::uint64_t kDriftStream = 0x64726966;
constexpr std::uint64_t kContextStream = 0x63747874;
constexpr std::uint64_t kAssignStream = 0x61736767;
constexpr std::uint64_t kAttackStream = 0x6174746b;

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

// Population-mean prototype shared by every user; separability scales how
// far individual models wander from it.
struct PopulationBasis {
  std::array<ChannelBasis, 6> channels;
};

const PopulationBasis& population_basis() {
  static const PopulationBasis basis = [] {
    PopulationBasis b;
    Rng rng(mix_seed(0x706f70756c, {1}));
    const std::array<double, 6> axis_amp{1.1, 1.35, 1.5, 0.85, 0.65, 0.5};
    const std::array<double, kComponents> comp_amp{1.0, 0.65, 0.45, 0.3};
    const std::array<double, kComponents> comp_freq{2.1, 1.3, 0.7, 1.7};
    for (int c = 0; c < 6; ++c) {
      ChannelBasis& ch = b.channels[c];
      for (int h = 0; h < kComponents; ++h) {
        ch.amp[h] = axis_amp[c] * comp_amp[h];
        ch.freq[h] = comp_freq[h] * rng.uniform(0.92, 1.08);
        ch.phase[h] = rng.uniform(0.0, kTwoPi);
      }
    }
    // Rest: phone flat on a surface. End: held tilted toward the user.
    b.channels[0].rest = 0.0;
    b.channels[1].rest = 0.0;
    b.channels[2].rest = kGravity;
    b.channels[0].end = 0.6;
    b.channels[1].end = 5.0;
    b.channels[2].end = 8.42;
    return b;
  }();
  return basis;
}

struct ContextOffset {
  std::array<double, 6> phase_shift{};
  std::array<double, 6> end_shift{};  // acc axes only carry orientation shifts
  double amp_scale = 1.0;
};

ContextOffset context_offset(int context, double scale) {
  ContextOffset off;
  Rng rng(mix_seed(kContextStream, {static_cast<std::uint64_t>(context)}));
  for (int c = 0; c < 6; ++c) off.phase_shift[c] = scale * rng.uniform(-0.9, 0.9);
  for (int c = 0; c < 3; ++c) off.end_shift[c] = scale * rng.uniform(-1.1, 1.1);
  off.amp_scale = 1.0 + scale * rng.uniform(-0.18, 0.18);
  return off;
}

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace

UserMotionModel blend_models(const UserMotionModel& a, const UserMotionModel& b, double t) {
  UserMotionModel out = a;
  auto mix = [t](double x, double y) { return (1.0 - t) * x + t * y; };
  for (int c = 0; c < 6; ++c) {
    out.channels[c].rest = mix(a.channels[c].rest, b.channels[c].rest);
    out.channels[c].end = mix(a.channels[c].end, b.channels[c].end);
    for (int h = 0; h < kComponents; ++h) {
      out.channels[c].amp[h] = mix(a.channels[c].amp[h], b.channels[c].amp[h]);
      out.channels[c].freq[h] = mix(a.channels[c].freq[h], b.channels[c].freq[h]);
      out.channels[c].phase[h] = mix(a.channels[c].phase[h], b.channels[c].phase[h]);
    }
  }
  out.duration_mean_s = mix(a.duration_mean_s, b.duration_mean_s);
  out.duration_sd_s = mix(a.duration_sd_s, b.duration_sd_s);
  out.seed = mix_seed(a.seed, {b.seed, static_cast<std::uint64_t>(t * 1e6)});
  return out;
}

namespace {

std::string format_ms(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Genuine: return "genuine";
    case ScenarioKind::RA: return "RA";
    case ScenarioKind::CAA: return "CAA";
    case ScenarioKind::EA: return "EA";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& label) {
  if (label == "genuine") return ScenarioKind::Genuine;
  if (label == "RA") return ScenarioKind::RA;
  if (label == "CAA") return ScenarioKind::CAA;
  if (label == "EA") return ScenarioKind::EA;
  throw std::invalid_argument("unknown scenario kind '" + label + "'");
}

std::string user_label(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "u%02d", index);
  return buf;
}

UserMotionModel dataset_user_model(const DatasetConfig& config, int u) {
  return make_user(mix_seed(config.seed, {kUserStream, static_cast<std::uint64_t>(u)}),
                   config.gen);
}

std::uint64_t dataset_sample_seed(const DatasetConfig& config, int u, int c, int r) {
  return mix_seed(config.seed, {static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(c),
                                static_cast<std::uint64_t>(r)});
}

UserMotionModel make_user(std::uint64_t seed, const GenParams& params) {
  const PopulationBasis& pop = population_basis();
  Rng rng(mix_seed(seed, {kUserStream}));

  UserMotionModel model;
  model.seed = seed;
  model.acc_noise_sd = params.acc_noise_sd;
  model.gyr_noise_sd = params.gyr_noise_sd;
  model.drift_rate = params.drift_rate;
  model.duration_mean_s = rng.uniform(1.1, 2.4);
  model.duration_sd_s = 0.15 * model.duration_mean_s;

  for (int c = 0; c < 6; ++c) {
    const bool acc = c < 3;
    const double sep = acc ? params.acc_separability : params.gyr_separability;
    ChannelBasis& ch = model.channels[c];
    const ChannelBasis& mean = pop.channels[c];
    for (int h = 0; h < kComponents; ++h) {
      ch.amp[h] = mean.amp[h] * std::max(0.15, 1.0 + sep * rng.normal(0.0, 0.45));
      ch.freq[h] = std::max(0.3, mean.freq[h] * (1.0 + 0.2 * sep * rng.normal()));
      ch.phase[h] = mean.phase[h] + sep * rng.normal(0.0, 1.1);
    }
    ch.rest = mean.rest;
    ch.end = mean.end;
  }
  // Resting orientation: modest per-user tilt, z completing the gravity norm.
  const double rx = params.acc_separability * rng.normal(0.0, 0.45);
  const double ry = params.acc_separability * rng.normal(0.0, 0.45);
  model.channels[0].rest = rx;
  model.channels[1].rest = ry;
  model.channels[2].rest = std::sqrt(std::max(1.0, kGravity * kGravity - rx * rx - ry * ry));
  // Hold orientation: user-specific, renormalized onto the gravity sphere.
  std::array<double, 3> end{};
  double norm = 0.0;
  for (int c = 0; c < 3; ++c) {
    end[c] = pop.channels[c].end + params.acc_separability * rng.normal(0.0, 0.9);
    norm += end[c] * end[c];
  }
  norm = std::sqrt(norm);
  for (int c = 0; c < 3; ++c) model.channels[c].end = end[c] / norm * kGravity;
  for (int c = 3; c < 6; ++c) {
    model.channels[c].rest = 0.0;
    model.channels[c].end = 0.0;
  }
  return model;
}

UserMotionModel drift_user(const UserMotionModel& model, int days, std::uint64_t stream,
                           const GenParams& params) {
  UserMotionModel out = model;
  Rng rng(mix_seed(model.seed, {kDriftStream, stream}));
  for (int day = 0; day < days; ++day) {
    for (int c = 0; c < 6; ++c) {
      for (int h = 0; h < kComponents; ++h) {
        out.channels[c].amp[h] *= std::max(0.2, 1.0 + params.drift_rate * rng.normal());
        out.channels[c].phase[h] += 0.5 * params.drift_rate * rng.normal();
      }
      if (c < 3) out.channels[c].end += 0.5 * params.drift_rate * rng.normal();
    }
  }
  return out;
}

GeneratedTrace gen_pickup_trace(const UserMotionModel& model, const GenScenario& scenario,
                                std::uint64_t sample_seed, const GenParams& params) {
  Rng rng(mix_seed(model.seed,
                   {kTraceStream, static_cast<std::uint64_t>(scenario.kind),
                    static_cast<std::uint64_t>(scenario.context),
                    scenario.stable_prefix ? 1ull : 0ull, sample_seed}));
  const ContextOffset ctx = context_offset(scenario.context, params.context_shift);

  const double duration_s = clamp(rng.normal(model.duration_mean_s, model.duration_sd_s), 0.8, 3.2);
  const double prefix_s = scenario.stable_prefix
                              ? rng.uniform(params.flat_prefix_min_s, params.flat_prefix_max_s)
                              : params.walk_prefix_s;

  // Per-trace behavioral jitter, drawn once.
  std::array<ChannelBasis, 6> basis = model.channels;
  for (int c = 0; c < 6; ++c) {
    for (int h = 0; h < kComponents; ++h) {
      basis[c].amp[h] *= ctx.amp_scale * std::max(0.2, 1.0 + params.intra_jitter * rng.normal());
      basis[c].phase[h] += ctx.phase_shift[c] + 0.8 * params.intra_jitter * rng.normal();
    }
    if (c < 3) basis[c].end += ctx.end_shift[c] + 0.6 * params.intra_jitter * rng.normal();
  }

  // Walking prefix: per-axis gait oscillation well above the flat bounds.
  std::array<double, 6> walk_amp{0.5, 0.55, 0.9, 0.2, 0.22, 0.3};
  std::array<double, 6> walk_freq{};
  std::array<double, 6> walk_phase{};
  for (int c = 0; c < 6; ++c) {
    walk_freq[c] = rng.uniform(1.6, 2.2);
    walk_phase[c] = rng.uniform(0.0, kTwoPi);
  }

  const double dt = 1.0 / params.rate_hz;
  const std::size_t prefix_pts = static_cast<std::size_t>(std::llround(prefix_s / dt));
  const std::size_t motion_pts =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(duration_s / dt)));
  const double motion_start_s = static_cast<double>(prefix_pts) * dt;
  const double t_end_s = static_cast<double>(prefix_pts + motion_pts) * dt;
  const double motion_span_s = t_end_s - motion_start_s;

  std::vector<sig::SensorSample> samples;
  samples.reserve(prefix_pts + motion_pts + 1);
  for (std::size_t idx = 0; idx <= prefix_pts + motion_pts; ++idx) {
    const double t = static_cast<double>(idx) * dt;
    sig::SensorSample s;
    s.t_ms = t * 1000.0;
    for (int c = 0; c < 6; ++c) {
      const bool acc = c < 3;
      double v;
      if (t < motion_start_s) {
        v = basis[c].rest;
        if (!scenario.stable_prefix)
          v += walk_amp[c] * std::sin(kTwoPi * walk_freq[c] * t + walk_phase[c]);
      } else {
        const double u = std::min(1.0, (t - motion_start_s) / motion_span_s);
        // Fast attack envelope, short release, so the flat/motion boundary
        // is sharp and the trigger is reached near the hold orientation.
        const double r0 = clamp(0.05 / motion_span_s, 0.02, 0.2);
        const double r1 = clamp(0.10 / motion_span_s, 0.03, 0.25);
        const double env = std::max(0.0, std::min({1.0, u / r0, (1.0 - u) / r1}));
        double osc = 0.0;
        for (int h = 0; h < kComponents; ++h)
          osc += basis[c].amp[h] * std::sin(kTwoPi * basis[c].freq[h] * u + basis[c].phase[h]);
        v = basis[c].rest + (basis[c].end - basis[c].rest) * smoothstep(u) + env * osc;
      }
      v += rng.normal(0.0, acc ? model.acc_noise_sd : model.gyr_noise_sd);
      if (acc) {
        s.acc[c] = v;
      } else {
        s.gyro[c - 3] = v;
      }
    }
    samples.push_back(s);
  }

  std::vector<sig::TraceEvent> events{{t_end_s * 1000.0, sig::EventKind::Trigger}};
  GeneratedTrace out{sig::SensorTrace(std::move(samples), std::move(events), params.rate_hz),
                     GroundTruth{scenario, motion_start_s * 1000.0, t_end_s * 1000.0}};
  return out;
}

GeneratedTrace gen_attack(const UserMotionModel& victim, const UserMotionModel& attacker,
                          ScenarioKind kind, int context, std::uint64_t sample_seed,
                          const GenParams& params) {
  Rng rng(mix_seed(victim.seed, {kAttackStream, attacker.seed,
                                 static_cast<std::uint64_t>(kind), sample_seed}));
  GenScenario scenario;
  scenario.kind = kind;
  scenario.stable_prefix = true;
  switch (kind) {
    case ScenarioKind::RA: {
      // Brute force: the attacker grabs an unfamiliar phone in a random
      // place, so on top of the context mismatch their motion is perturbed
      // well beyond their own habitual variation.
      scenario.context = static_cast<int>(rng.below(12));
      UserMotionModel careless = attacker;
      for (int c = 0; c < 6; ++c) {
        for (int h = 0; h < kComponents; ++h) {
          careless.channels[c].amp[h] *= rng.uniform(0.7, 1.45);
          careless.channels[c].phase[h] += rng.normal(0.0, 0.45);
        }
        if (c < 3) careless.channels[c].end += rng.normal(0.0, 0.5);
      }
      careless.duration_mean_s = clamp(attacker.duration_mean_s * rng.uniform(0.8, 1.3), 0.9, 2.9);
      return gen_pickup_trace(careless, scenario, rng.next_u64(), params);
    }
    case ScenarioKind::CAA:
      scenario.context = context;
      return gen_pickup_trace(attacker, scenario, rng.next_u64(), params);
    case ScenarioKind::EA: {
      scenario.context = context;
      const UserMotionModel blended = blend_models(attacker, victim, params.mimic_skill);
      return gen_pickup_trace(blended, scenario, rng.next_u64(), params);
    }
    case ScenarioKind::Genuine:
      break;
  }
  throw std::invalid_argument("gen_attack: kind must be RA, CAA or EA");
}

std::filesystem::path gen_dataset(const DatasetConfig& config,
                                  const std::filesystem::path& out_dir) {
  if (config.users < 1 || config.contexts < 1 || config.contexts > 12 || config.reps < 1)
    throw std::invalid_argument("gen_dataset: users/contexts/reps out of range");
  if (config.attacks && config.victims + config.attackers > config.users)
    throw std::invalid_argument("gen_dataset: victims + attackers must not exceed users");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("gen_dataset: cannot create '" + out_dir.string() + "'");

  std::vector<UserMotionModel> models;
  models.reserve(config.users);
  for (int u = 0; u < config.users; ++u) models.push_back(dataset_user_model(config, u));

  std::vector<ManifestEntry> entries;
  char name[64];
  for (int u = 0; u < config.users; ++u) {
    for (int c = 0; c < config.contexts; ++c) {
      for (int r = 0; r < config.reps; ++r) {
        bool stable = true;
        if (config.stable_prefix_fraction < 1.0) {
          Rng assign(mix_seed(config.seed, {kAssignStream, static_cast<std::uint64_t>(u),
                                            static_cast<std::uint64_t>(c),
                                            static_cast<std::uint64_t>(r)}));
          stable = assign.uniform() < config.stable_prefix_fraction;
        }
        const GenScenario scenario{ScenarioKind::Genuine, c, stable};
        const auto g =
            gen_pickup_trace(models[u], scenario, dataset_sample_seed(config, u, c, r), config.gen);
        std::snprintf(name, sizeof(name), "u%02d_c%02d_r%02d.trace", u, c, r);
        sig::write_trace_file(out_dir / name, g.trace);
        entries.push_back(ManifestEntry{name, user_label(u), "genuine", c, stable,
                                        g.truth.t_begin_ms, g.truth.t_end_ms});
      }
    }
  }

  if (config.attacks) {
    for (ScenarioKind kind : {ScenarioKind::RA, ScenarioKind::CAA, ScenarioKind::EA}) {
      for (int v = 0; v < config.victims; ++v) {
        for (int a = 0; a < config.attackers; ++a) {
          for (int r = 0; r < config.attack_reps; ++r) {
            const int context = r % config.contexts;
            const auto g = gen_attack(models[v], models[config.victims + a], kind, context,
                                      mix_seed(config.seed, {kAttackStream,
                                                             static_cast<std::uint64_t>(v),
                                                             static_cast<std::uint64_t>(a),
                                                             static_cast<std::uint64_t>(r)}),
                                      config.gen);
            std::snprintf(name, sizeof(name), "atk_%s_v%02d_a%02d_r%02d.trace",
                          to_string(kind).c_str(), v, a, r);
            sig::write_trace_file(out_dir / name, g.trace);
            entries.push_back(ManifestEntry{name, user_label(v), to_string(kind), context, true,
                                            g.truth.t_begin_ms, g.truth.t_end_ms});
          }
        }
      }
    }
  }

  const std::filesystem::path manifest_path = out_dir / "manifest.tsv";
  std::ofstream out(manifest_path);
  if (!out) throw std::runtime_error("gen_dataset: cannot write manifest");
  out << "#filename\tuser_id\tkind\tcontext\tstable_prefix\tt_begin_ms\tt_end_ms\n";
  for (const ManifestEntry& e : entries) {
    out << e.filename << '\t' << e.user_id << '\t' << e.kind << '\t' << e.context << '\t'
        << (e.stable_prefix ? 1 : 0) << '\t' << format_ms(e.t_begin_ms) << '\t'
        << format_ms(e.t_end_ms) << '\n';
  }
  if (!out) throw std::runtime_error("gen_dataset: manifest write failed");
  return manifest_path;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest '" + manifest_path.string() + "'");
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find('\t', start);
      fields.push_back(line.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (fields.size() != 7)
      throw std::runtime_error(manifest_path.string() + ":" + std::to_string(line_no) +
                               ": expected 7 tab-separated fields");
    ManifestEntry e;
    e.filename = fields[0];
    e.user_id = fields[1];
    e.kind = fields[2];
    e.context = std::stoi(fields[3]);
    e.stable_prefix = fields[4] == "1";
    e.t_begin_ms = std::stod(fields[5]);
    e.t_end_ms = std::stod(fields[6]);
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace pickauth::gen
