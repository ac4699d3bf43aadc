#include "pickauth/profile_io.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace pickauth::auth {

namespace {

constexpr const char* kMagic = "#profile-v1";

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_profile_stream(std::ostream& out, const Profile& p) {
  const sig::PickUpSignal& t = p.template_signal;
  out << kMagic << '\n';
  out << "user_id=" << p.user_id << '\n';
  out << "theta=" << format_g17(p.theta) << '\n';
  out << "weights=";
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    if (i) out << ',';
    out << format_g17(p.weights[i]);
  }
  out << '\n';
  out << "update_count=" << p.update_count << '\n';
  out << "t_begin=" << format_g17(t.t_begin_ms) << '\n';
  out << "t_end=" << format_g17(t.t_end_ms) << '\n';
  out << "channels=";
  for (std::size_t i = 0; i < t.signal.channel_ids().size(); ++i) {
    if (i) out << ',';
    out << t.signal.channel_ids()[i];
  }
  out << '\n';
  const std::size_t n = t.signal.length();
  const double step = n > 1 ? (t.t_end_ms - t.t_begin_ms) / static_cast<double>(n - 1) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out << format_g17(t.t_begin_ms + step * static_cast<double>(i));
    for (std::size_t c = 0; c < t.signal.channel_count(); ++c)
      out << ',' << format_g17(t.signal.channel(c)[i]);
    out << '\n';
  }
}

std::vector<std::string> split_str(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("profile: malformed number '" + s + "'");
  }
}

Profile read_profile_stream(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw std::runtime_error(name + ": not a " + kMagic + " file");

  std::string user_id;
  double theta = 0.0, t_begin = 0.0, t_end = 0.0;
  unsigned update_count = 0;
  std::vector<double> weights;
  std::vector<std::string> channel_ids;
  std::vector<std::vector<double>> columns;

  auto is_key = [](const std::string& s, std::size_t eq) {
    if (eq == std::string::npos || eq == 0) return false;
    for (std::size_t i = 0; i < eq; ++i)
      if (!std::isalpha(static_cast<unsigned char>(s[i])) && s[i] != '_') return false;
    return true;
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (is_key(line, eq)) {
      const std::string key = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      if (key == "user_id") {
        user_id = value;
      } else if (key == "theta") {
        theta = to_double(value);
      } else if (key == "weights") {
        for (const std::string& w : split_str(value, ',')) weights.push_back(to_double(w));
      } else if (key == "update_count") {
        update_count = static_cast<unsigned>(to_double(value));
      } else if (key == "t_begin") {
        t_begin = to_double(value);
      } else if (key == "t_end") {
        t_end = to_double(value);
      } else if (key == "channels") {
        channel_ids = split_str(value, ',');
        columns.resize(channel_ids.size());
      } else {
        throw std::runtime_error(name + ": unknown profile key '" + key + "'");
      }
      continue;
    }
    const auto fields = split_str(line, ',');
    if (channel_ids.empty() || fields.size() != channel_ids.size() + 1)
      throw std::runtime_error(name + ": malformed template sample line");
    for (std::size_t c = 0; c < channel_ids.size(); ++c)
      columns[c].push_back(to_double(fields[c + 1]));
  }

  if (columns.empty() || columns.front().empty())
    throw std::runtime_error(name + ": profile has no template samples");
  std::vector<Series> channels;
  channels.reserve(columns.size());
  for (auto& col : columns) channels.emplace_back(std::move(col));

  sig::PickUpSignal tmpl{MultiSeries(std::move(channels), channel_ids), t_begin, t_end, user_id, {}};
  return Profile{user_id, std::move(tmpl), WeightVector(std::move(weights)), theta, update_count};
}

struct FileLock {
  int fd = -1;

  explicit FileLock(const std::filesystem::path& path) {
    fd = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd < 0)
      throw std::runtime_error("cannot open '" + path.string() + "': " + std::strerror(errno));
    if (::flock(fd, LOCK_EX) != 0) {
      ::close(fd);
      throw std::runtime_error("cannot lock '" + path.string() + "': " + std::strerror(errno));
    }
  }
  ~FileLock() {
    if (fd >= 0) {
      ::flock(fd, LOCK_UN);
      ::close(fd);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;
};

}  // namespace

void save_profile(const std::filesystem::path& path, const Profile& profile) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile '" + path.string() + "'");
  write_profile_stream(out, profile);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Profile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile '" + path.string() + "'");
  return read_profile_stream(in, path.string());
}

Profile with_locked_profile(const std::filesystem::path& path,
                            const std::function<Profile(Profile)>& mutate) {
  FileLock lock(path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile '" + path.string() + "'");
  Profile stored = read_profile_stream(in, path.string());
  in.close();
  Profile next = mutate(std::move(stored));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot rewrite profile '" + path.string() + "'");
  write_profile_stream(out, next);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  return next;
}

}  // namespace pickauth::auth
