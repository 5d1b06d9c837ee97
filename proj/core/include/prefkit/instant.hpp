#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace prefkit {

// A UTC point in time with microsecond resolution. All platform datetimes
// are normalized to this on parse; comparisons are plain integer compares.
struct Instant {
  std::int64_t micros = 0;  // since 1970-01-01T00:00:00Z

  friend auto operator<=>(const Instant&, const Instant&) = default;
};

// Parses an RFC-3339-style datetime: "YYYY-MM-DD[T ]HH:MM:SS[.frac][Z|+HH:MM|-HH:MM]".
// A missing offset is read as UTC. Returns nullopt on malformed input.
std::optional<Instant> parse_instant(std::string_view text);

// Canonical form: "YYYY-MM-DDTHH:MM:SSZ", with ".ffffff" inserted when the
// value has sub-second precision. parse_instant(format_instant(t)) == t.
std::string format_instant(Instant t);

}  // namespace prefkit
