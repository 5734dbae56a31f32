#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace bowtie {

// Day-granularity calendar date.
using Date = std::chrono::year_month_day;

// Strict YYYY-MM-DD. Returns nullopt on anything else, including impossible
// days such as 2011-02-30.
inline std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len, int& out) {
    const char* first = text.data() + pos;
    const char* last = first + len;
    for (const char* p = first; p != last; ++p)
      if (*p < '0' || *p > '9') return false;
    return std::from_chars(first, last, out).ec == std::errc{};
  };
  int y = 0, m = 0, d = 0;
  if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d)) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

// Calendar month arithmetic, clamping the day to the end of the target month
// (Jan 31 + 1 month = Feb 28 or 29).
inline Date add_months(const Date& date, int months) {
  using namespace std::chrono;
  const year_month ym = year_month{date.year(), date.month()} + std::chrono::months{months};
  const day last = year_month_day_last{ym.year(), month_day_last{ym.month()}}.day();
  return Date{ym.year(), ym.month(), date.day() > last ? last : date.day()};
}

// Whole elapsed months from `from` to `to`, floored. Negative when `to`
// precedes `from`.
inline int whole_months_between(const Date& from, const Date& to) {
  const int months = (static_cast<int>(to.year()) - static_cast<int>(from.year())) * 12 +
                     (static_cast<int>(static_cast<unsigned>(to.month())) -
                      static_cast<int>(static_cast<unsigned>(from.month())));
  if (months > 0 && to.day() < from.day()) return months - 1;
  if (months < 0 && to.day() > from.day()) return months + 1;
  return months;
}

}  // namespace bowtie
