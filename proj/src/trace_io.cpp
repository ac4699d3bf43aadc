#include "pickauth/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace pickauth::sig {

namespace {

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw ParseError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view token, std::string_view source, std::size_t line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) fail(source, line, "malformed number '" + std::string(token) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

void append_number(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  line += buf;
}

}  // namespace

SensorTrace read_trace(std::istream& in, std::string_view source_name) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) fail(source_name, 1, "empty input");
  ++line_no;
  if (!line.starts_with("#rate=")) fail(source_name, line_no, "expected '#rate=<Hz>' header");
  const double rate = parse_double(std::string_view(line).substr(6), source_name, line_no);
  if (!(rate > 0.0)) fail(source_name, line_no, "rate must be positive");

  std::vector<SensorSample> samples;
  std::vector<TraceEvent> events;
  double prev_t = 0.0;
  bool have_prev = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '!') {
      const auto fields = split(std::string_view(line).substr(1), ',');
      if (fields.size() != 2) fail(source_name, line_no, "event line needs 't,kind'");
      const double t = parse_double(fields[0], source_name, line_no);
      if (fields[1] != "trigger")
        fail(source_name, line_no, "unknown event kind '" + std::string(fields[1]) + "'");
      events.push_back(TraceEvent{t, EventKind::Trigger});
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 7) fail(source_name, line_no, "sample line needs 7 fields");
    SensorSample s;
    s.t_ms = parse_double(fields[0], source_name, line_no);
    for (std::size_t i = 0; i < 3; ++i) s.acc[i] = parse_double(fields[1 + i], source_name, line_no);
    for (std::size_t i = 0; i < 3; ++i) s.gyro[i] = parse_double(fields[4 + i], source_name, line_no);
    if (have_prev && s.t_ms <= prev_t) fail(source_name, line_no, "non-monotone timestamp");
    prev_t = s.t_ms;
    have_prev = true;
    samples.push_back(s);
  }
  return SensorTrace(std::move(samples), std::move(events), rate);
}

SensorTrace read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file '" + path.string() + "'");
  return read_trace(in, path.string());
}

void write_trace(std::ostream& out, const SensorTrace& trace) {
  std::string line;
  line = "#rate=";
  append_number(line, trace.nominal_rate_hz());
  line += '\n';
  out << line;

  // Events interleaved at their time position, after the covering sample.
  std::size_t next_event = 0;
  const auto& events = trace.events();
  for (const SensorSample& s : trace.samples()) {
    line.clear();
    append_number(line, s.t_ms);
    for (double v : s.acc) {
      line += ',';
      append_number(line, v);
    }
    for (double v : s.gyro) {
      line += ',';
      append_number(line, v);
    }
    line += '\n';
    out << line;
    while (next_event < events.size() && events[next_event].t_ms <= s.t_ms) {
      line = "!";
      append_number(line, events[next_event].t_ms);
      line += ",trigger\n";
      out << line;
      ++next_event;
    }
  }
  for (; next_event < events.size(); ++next_event) {
    line = "!";
    append_number(line, events[next_event].t_ms);
    line += ",trigger\n";
    out << line;
  }
}

void write_trace_file(const std::filesystem::path& path, const SensorTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file '" + path.string() + "'");
  write_trace(out, trace);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace pickauth::sig
