#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ucvf {

bool is_leap_year(int year);
int days_in_month(int year, int month);  // month 1..12

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);

// 0 = Sunday .. 6 = Saturday.
int weekday_of(int year, int month, int day);

// "Jan".."Dec" -> 1..12 (case-sensitive three-letter names as used in the data files).
std::optional<int> month_from_name(std::string_view name);
std::string_view month_name(int month);

// "Sun".."Sat" -> 0..6.
std::optional<int> weekday_from_name(std::string_view name);
std::string_view weekday_name(int weekday);

struct IsoWeek {
    int year = 0;  // ISO week-based year (may differ from the calendar year at edges)
    int week = 0;  // 1..53
};
IsoWeek iso_week_of(int year, int month, int day);

}  // namespace ucvf
