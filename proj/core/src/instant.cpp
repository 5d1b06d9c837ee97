#include "prefkit/instant.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace prefkit {

namespace {

constexpr std::int64_t kMicrosPerSec = 1'000'000;

// Howard Hinnant's days-from-civil algorithm; proleptic Gregorian calendar.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yr + (m <= 2));
}

bool take_int(std::string_view& s, size_t digits, int& out) {
  if (s.size() < digits) return false;
  int value = 0;
  for (size_t i = 0; i < digits; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  s.remove_prefix(digits);
  return true;
}

bool take_char(std::string_view& s, char expected) {
  if (s.empty() || s.front() != expected) return false;
  s.remove_prefix(1);
  return true;
}

}  // namespace

std::optional<Instant> parse_instant(std::string_view s) {
  int year, month, day, hour, minute, second;
  if (!take_int(s, 4, year) || !take_char(s, '-') || !take_int(s, 2, month) ||
      !take_char(s, '-') || !take_int(s, 2, day)) {
    return std::nullopt;
  }
  if (s.empty() || (s.front() != 'T' && s.front() != 't' && s.front() != ' ')) {
    return std::nullopt;
  }
  s.remove_prefix(1);
  if (!take_int(s, 2, hour) || !take_char(s, ':') || !take_int(s, 2, minute) ||
      !take_char(s, ':') || !take_int(s, 2, second)) {
    return std::nullopt;
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
      minute > 59 || second > 60) {
    return std::nullopt;
  }

  std::int64_t frac_micros = 0;
  if (!s.empty() && s.front() == '.') {
    s.remove_prefix(1);
    std::int64_t scale = 100'000;
    size_t n = 0;
    while (n < s.size() && s[n] >= '0' && s[n] <= '9') {
      if (scale > 0) {
        frac_micros += (s[n] - '0') * scale;
        scale /= 10;
      }
      ++n;
    }
    if (n == 0) return std::nullopt;
    s.remove_prefix(n);
  }

  std::int64_t offset_secs = 0;
  if (!s.empty()) {
    char c = s.front();
    if (c == 'Z' || c == 'z') {
      s.remove_prefix(1);
    } else if (c == '+' || c == '-') {
      s.remove_prefix(1);
      int oh, om;
      if (!take_int(s, 2, oh)) return std::nullopt;
      if (!s.empty() && s.front() == ':') s.remove_prefix(1);
      if (!take_int(s, 2, om)) return std::nullopt;
      offset_secs = (c == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
    }
  }
  if (!s.empty()) return std::nullopt;

  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                            static_cast<unsigned>(day));
  const std::int64_t secs =
      days * 86400 + hour * 3600LL + minute * 60LL + second - offset_secs;
  return Instant{secs * kMicrosPerSec + frac_micros};
}

std::string format_instant(Instant t) {
  std::int64_t micros = t.micros % kMicrosPerSec;
  std::int64_t secs = t.micros / kMicrosPerSec;
  if (micros < 0) {
    micros += kMicrosPerSec;
    secs -= 1;
  }
  std::int64_t days = secs / 86400;
  std::int64_t sod = secs % 86400;
  if (sod < 0) {
    sod += 86400;
    days -= 1;
  }
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  std::array<char, 40> buf{};
  int len;
  if (micros != 0) {
    len = std::snprintf(buf.data(), buf.size(),
                        "%04d-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ", y, m, d,
                        static_cast<long long>(sod / 3600),
                        static_cast<long long>((sod / 60) % 60),
                        static_cast<long long>(sod % 60),
                        static_cast<long long>(micros));
  } else {
    len = std::snprintf(buf.data(), buf.size(),
                        "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                        static_cast<long long>(sod / 3600),
                        static_cast<long long>((sod / 60) % 60),
                        static_cast<long long>(sod % 60));
  }
  return std::string(buf.data(), static_cast<size_t>(len));
}

}  // namespace prefkit
