#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ucvf {

struct Timestamp {
    int year = 0;
    int month = 0;  // 1..12
    int day = 0;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
    int weekday = 0;  // 0=Sun..6=Sat, validated against the date at parse time

    // Seconds since 1970-01-01 00:00:00, used as the chronological sort key.
    std::int64_t epoch_seconds() const;
};

struct CheckIn {
    std::string user_id;
    std::string poi_id;
    std::string category_id;
    std::string category_name;
    double latitude = 0.0;   // degrees, [-90, 90]
    double longitude = 0.0;  // degrees, [-180, 180]
    Timestamp time;
};

// Column positions of the 11-field tab-separated check-in format:
// user, poi, category id, category name, latitude, longitude,
// weekday, year, month, day, clock time.
struct CheckinSchema {
    int user = 0;
    int poi = 1;
    int category = 2;
    int category_name = 3;
    int latitude = 4;
    int longitude = 5;
    int weekday = 6;
    int year = 7;
    int month = 8;
    int day = 9;
    int time = 10;
    int field_count = 11;
};

// Parses one tab-separated line. Fields are whitespace-trimmed. Throws
// MalformedLineError on a wrong field count, InvalidCoordinateError on
// unparseable or out-of-range coordinates, InvalidDateError on bad dates,
// clock times, or a weekday that contradicts the date. Coordinate and id
// fields may carry a trailing '*' truncation marker, which is ignored.
CheckIn parse_checkin_line(std::string_view line,
                           const CheckinSchema& schema = {},
                           std::size_t line_number = 0);

// Writes the check-in back to the same tab-separated layout. Coordinates are
// printed with enough digits to round-trip exactly.
std::string serialize_checkin(const CheckIn& c, const CheckinSchema& schema = {});

}  // namespace ucvf
