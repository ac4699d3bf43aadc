#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string_view>

#include "pickauth/signal.hpp"

namespace pickauth::sig {

/// Raised on malformed trace input; the message carries source name and line.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Line-oriented trace format:
///   #rate=<Hz>
///   t,ax,ay,az,gx,gy,gz     sample (t in ms)
///   !t,trigger              event
SensorTrace read_trace(std::istream& in, std::string_view source_name = "<stream>");
SensorTrace read_trace_file(const std::filesystem::path& path);

void write_trace(std::ostream& out, const SensorTrace& trace);
void write_trace_file(const std::filesystem::path& path, const SensorTrace& trace);

}  // namespace pickauth::sig
