#include "ucvf/timeutil.hpp"

#include <array>

namespace ucvf {

namespace {

constexpr std::array<std::string_view, 12> kMonthNames = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

constexpr std::array<std::string_view, 7> kWeekdayNames = {
    "Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};

}  // namespace

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[static_cast<std::size_t>(month - 1)];
}

std::int64_t days_from_civil(int y, int m, int d) {
    // Howard Hinnant's algorithm, valid for the proleptic Gregorian calendar.
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int weekday_of(int year, int month, int day) {
    const std::int64_t z = days_from_civil(year, month, day);
    // 1970-01-01 was a Thursday (weekday 4).
    return static_cast<int>(((z % 7) + 11) % 7);
}

std::optional<int> month_from_name(std::string_view name) {
    for (int i = 0; i < 12; ++i) {
        if (kMonthNames[static_cast<std::size_t>(i)] == name) return i + 1;
    }
    return std::nullopt;
}

std::string_view month_name(int month) {
    return kMonthNames[static_cast<std::size_t>(month - 1)];
}

std::optional<int> weekday_from_name(std::string_view name) {
    for (int i = 0; i < 7; ++i) {
        if (kWeekdayNames[static_cast<std::size_t>(i)] == name) return i;
    }
    return std::nullopt;
}

std::string_view weekday_name(int weekday) {
    return kWeekdayNames[static_cast<std::size_t>(weekday)];
}

IsoWeek iso_week_of(int year, int month, int day) {
    // ISO 8601: week 1 is the week containing the first Thursday of the year,
    // weeks run Monday..Sunday.
    const std::int64_t z = days_from_civil(year, month, day);
    const int wd = weekday_of(year, month, day);
    const int iso_wd = wd == 0 ? 7 : wd;  // Mon=1..Sun=7
    // Thursday of this date's ISO week.
    const std::int64_t thursday = z + (4 - iso_wd);
    // The ISO year is the calendar year of that Thursday.
    int iso_year = year;
    {
        // Walk the Thursday back to a civil date by searching the nearby years.
        for (int y = year - 1; y <= year + 1; ++y) {
            const std::int64_t jan1 = days_from_civil(y, 1, 1);
            const std::int64_t dec31 = days_from_civil(y, 12, 31);
            if (thursday >= jan1 && thursday <= dec31) {
                iso_year = y;
                break;
            }
        }
    }
    const std::int64_t jan1 = days_from_civil(iso_year, 1, 1);
    const int week = static_cast<int>((thursday - jan1) / 7) + 1;
    return IsoWeek{iso_year, week};
}

}  // namespace ucvf
