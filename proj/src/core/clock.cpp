#include "pc/core/clock.hpp"

#include <fmt/format.h>

#include <charconv>
#include <stdexcept>

namespace pc::core {

Timestamp now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const auto since_midnight = t - day;
  const hh_mm_ss hms{since_midnight};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z",
                     static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()), hms.hours().count(),
                     hms.minutes().count(), hms.seconds().count(),
                     hms.subseconds().count());
}

namespace {

int read_int(std::string_view s, std::size_t pos, std::size_t len) {
  if (pos + len > s.size()) throw std::invalid_argument("timestamp too short");
  int value = 0;
  const auto* first = s.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw std::invalid_argument("bad timestamp digits");
  }
  return value;
}

void expect_char(std::string_view s, std::size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c) throw std::invalid_argument("bad timestamp");
}

}  // namespace

Timestamp parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  // YYYY-MM-DDTHH:MM:SS.mmmZ
  if (s.size() != 24) throw std::invalid_argument("bad timestamp length");
  expect_char(s, 4, '-');
  expect_char(s, 7, '-');
  expect_char(s, 10, 'T');
  expect_char(s, 13, ':');
  expect_char(s, 16, ':');
  expect_char(s, 19, '.');
  expect_char(s, 23, 'Z');
  const year_month_day ymd{year{read_int(s, 0, 4)},
                           month{static_cast<unsigned>(read_int(s, 5, 2))},
                           day{static_cast<unsigned>(read_int(s, 8, 2))}};
  if (!ymd.ok()) throw std::invalid_argument("bad timestamp date");
  const int h = read_int(s, 11, 2);
  const int m = read_int(s, 14, 2);
  const int sec = read_int(s, 17, 2);
  const int ms = read_int(s, 20, 3);
  if (h > 23 || m > 59 || sec > 59) throw std::invalid_argument("bad timestamp time");
  return sys_days{ymd} + hours{h} + minutes{m} + seconds{sec} + milliseconds{ms};
}

}  // namespace pc::core
