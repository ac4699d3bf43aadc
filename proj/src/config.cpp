#include "pickauth/config.hpp"

#include <fstream>
#include <stdexcept>

namespace pickauth {

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: malformed value for '" + key + "': '" + value + "'");
  }
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: malformed value for '" + key + "': '" + value + "'");
  }
}

}  // namespace

void config_set(Config& config, const std::string& key, const std::string& value) {
  if (key == "theta") {
    config.theta = to_double(key, value);
  } else if (key == "acc_share") {
    config.acc_share = to_double(key, value);
  } else if (key == "rate") {
    config.rate_hz = to_double(key, value);
    config.dataset.gen.rate_hz = config.rate_hz;
  } else if (key == "flat.t_f") {
    config.extract.flat.t_f_s = to_double(key, value);
  } else if (key == "flat.epsilon_acc") {
    config.extract.flat.epsilon_acc = to_double(key, value);
  } else if (key == "flat.epsilon_gyr") {
    config.extract.flat.epsilon_gyr = to_double(key, value);
  } else if (key == "flat.window") {
    config.extract.flat.window = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "extract.min_duration") {
    config.extract.min_duration_s = to_double(key, value);
  } else if (key == "extract.max_duration") {
    config.extract.max_duration_s = to_double(key, value);
  } else if (key == "extract.max_backtrack") {
    config.extract.max_backtrack_s = to_double(key, value);
  } else if (key == "grid.points") {
    config.grid_points = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "jobs") {
    config.jobs = static_cast<int>(to_long(key, value));
  } else if (key == "gen.users") {
    config.dataset.users = static_cast<int>(to_long(key, value));
  } else if (key == "gen.contexts") {
    config.dataset.contexts = static_cast<int>(to_long(key, value));
  } else if (key == "gen.reps") {
    config.dataset.reps = static_cast<int>(to_long(key, value));
  } else if (key == "gen.seed") {
    config.dataset.seed = static_cast<std::uint64_t>(to_long(key, value));
  } else if (key == "gen.stable_fraction") {
    config.dataset.stable_prefix_fraction = to_double(key, value);
  } else if (key == "gen.attacks") {
    config.dataset.attacks = to_long(key, value) != 0;
  } else if (key == "gen.victims") {
    config.dataset.victims = static_cast<int>(to_long(key, value));
  } else if (key == "gen.attackers") {
    config.dataset.attackers = static_cast<int>(to_long(key, value));
  } else if (key == "gen.attack_reps") {
    config.dataset.attack_reps = static_cast<int>(to_long(key, value));
  } else if (key == "gen.acc_noise_sd") {
    config.dataset.gen.acc_noise_sd = to_double(key, value);
  } else if (key == "gen.gyr_noise_sd") {
    config.dataset.gen.gyr_noise_sd = to_double(key, value);
  } else if (key == "gen.acc_separability") {
    config.dataset.gen.acc_separability = to_double(key, value);
  } else if (key == "gen.gyr_separability") {
    config.dataset.gen.gyr_separability = to_double(key, value);
  } else if (key == "gen.intra_jitter") {
    config.dataset.gen.intra_jitter = to_double(key, value);
  } else if (key == "gen.context_shift") {
    config.dataset.gen.context_shift = to_double(key, value);
  } else if (key == "gen.drift_rate") {
    config.dataset.gen.drift_rate = to_double(key, value);
  } else if (key == "gen.mimic_skill") {
    config.dataset.gen.mimic_skill = to_double(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  Config config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    config_set(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

}  // namespace pickauth
