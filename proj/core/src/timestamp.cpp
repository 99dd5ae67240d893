#include "apisum/timestamp.hpp"

#include <cstdio>

#include "apisum/errors.hpp"

namespace apisum {

namespace {

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace

bool try_parse_timestamp(std::string_view text, Timestamp& out) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, ms = 0;
  if (!read_digits(text, 0, 4, y) || text.size() < 10 || text[4] != '-' ||
      !read_digits(text, 5, 2, mo) || text[7] != '-' || !read_digits(text, 8, 2, d)) {
    return false;
  }
  std::size_t pos = 10;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    if (!read_digits(text, pos + 1, 2, h) || text.size() < pos + 9 || text[pos + 3] != ':' ||
        !read_digits(text, pos + 4, 2, mi) || text[pos + 6] != ':' ||
        !read_digits(text, pos + 7, 2, s)) {
      return false;
    }
    pos += 9;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      // Keep up to millisecond precision, ignore further digits.
      int scale = 100;
      bool any = false;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        ms += (text[pos] - '0') * scale;
        scale /= 10;
        any = true;
        ++pos;
      }
      if (!any) return false;
    }
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) return false;

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return false;
  out = time_point_cast<milliseconds>(sys_days{ymd}) + hours{h} + minutes{mi} + seconds{s} +
        milliseconds{ms};
  return true;
}

Timestamp parse_timestamp(std::string_view text) {
  Timestamp t;
  if (!try_parse_timestamp(text, t)) {
    throw Error("invalid timestamp '" + std::string(text) + "'");
  }
  return t;
}

Timestamp end_of_day(Timestamp t) {
  using namespace std::chrono;
  return time_point_cast<milliseconds>(floor<days>(t) + days{1}) - milliseconds{1};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()),
                static_cast<int>(tod.subseconds().count()));
  return buf;
}

Timestamp from_unix_seconds(long long seconds) {
  return Timestamp{std::chrono::seconds{seconds}};
}

long long to_unix_seconds(Timestamp t) {
  return std::chrono::floor<std::chrono::seconds>(t).time_since_epoch().count();
}

}  // namespace apisum
