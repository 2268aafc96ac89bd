#include "ucvf/checkin.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "ucvf/errors.hpp"
#include "ucvf/timeutil.hpp"

namespace ucvf {

std::int64_t Timestamp::epoch_seconds() const {
    std::int64_t days = days_from_civil(year, month, day);
    return days * 86400 + hour * 3600 + minute * 60 + second;
}

namespace {

std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Drops a single trailing '*' truncation marker if present.
std::string_view strip_marker(std::string_view s) {
    if (!s.empty() && s.back() == '*') s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return out;
}

double parse_coordinate(std::string_view raw, const char* which, double lo, double hi,
                        std::size_t line_number, int field) {
    std::string_view s = strip_marker(trim(raw));
    if (s.empty())
        throw InvalidCoordinateError("empty " + std::string(which) + " field", line_number, field);
    std::string buf(s);
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size())
        throw InvalidCoordinateError("unparseable " + std::string(which) + " '" + buf + "'",
                                     line_number, field);
    if (!(v >= lo && v <= hi))
        throw InvalidCoordinateError(std::string(which) + " out of range: " + buf, line_number,
                                     field);
    return v;
}

int parse_int_field(std::string_view raw, const char* which, std::size_t line_number, int field) {
    std::string_view s = trim(raw);
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw InvalidDateError("unparseable " + std::string(which) + " '" + std::string(s) + "'",
                               line_number, field);
    return v;
}

}  // namespace

CheckIn parse_checkin_line(std::string_view line, const CheckinSchema& schema,
                           std::size_t line_number) {
    auto fields = split_tabs(line);
    if (static_cast<int>(fields.size()) != schema.field_count)
        throw MalformedLineError("expected " + std::to_string(schema.field_count) +
                                     " tab-separated fields, got " +
                                     std::to_string(fields.size()),
                                 line_number, -1);

    CheckIn c;
    c.user_id = std::string(trim(fields[schema.user]));
    c.poi_id = std::string(strip_marker(trim(fields[schema.poi])));
    c.category_id = std::string(strip_marker(trim(fields[schema.category])));
    c.category_name = std::string(trim(fields[schema.category_name]));
    if (c.user_id.empty())
        throw MalformedLineError("empty user id", line_number, schema.user);
    if (c.category_name.empty())
        throw MalformedLineError("empty category name", line_number, schema.category_name);

    c.latitude = parse_coordinate(fields[schema.latitude], "latitude", -90.0, 90.0, line_number,
                                  schema.latitude);
    c.longitude = parse_coordinate(fields[schema.longitude], "longitude", -180.0, 180.0,
                                   line_number, schema.longitude);

    Timestamp& t = c.time;
    t.year = parse_int_field(fields[schema.year], "year", line_number, schema.year);
    if (t.year < 1970 || t.year > 2100)
        throw InvalidDateError("year out of range: " + std::to_string(t.year), line_number,
                               schema.year);

    std::string_view mon = trim(fields[schema.month]);
    if (auto named = month_from_name(mon)) {
        t.month = *named;
    } else {
        // Numeric months are accepted as a fallback.
        t.month = parse_int_field(mon, "month", line_number, schema.month);
    }
    if (t.month < 1 || t.month > 12)
        throw InvalidDateError("month out of range: " + std::string(mon), line_number,
                               schema.month);

    t.day = parse_int_field(fields[schema.day], "day", line_number, schema.day);
    if (t.day < 1 || t.day > days_in_month(t.year, t.month))
        throw InvalidDateError("day out of range: " + std::to_string(t.day), line_number,
                               schema.day);

    std::string_view clock = trim(fields[schema.time]);
    int h = 0, m = 0, s = 0;
    char extra = 0;
    int n = std::sscanf(std::string(clock).c_str(), "%d:%d:%d%c", &h, &m, &s, &extra);
    if (n == 2) s = 0;
    if ((n != 2 && n != 3) || h < 0 || h > 23 || m < 0 || m > 59 || s < 0 || s > 59)
        throw InvalidDateError("unparseable clock time '" + std::string(clock) + "'", line_number,
                               schema.time);
    t.hour = h;
    t.minute = m;
    t.second = s;

    std::string_view wd = trim(fields[schema.weekday]);
    auto named_weekday = weekday_from_name(wd);
    if (!named_weekday)
        throw InvalidDateError("unknown weekday '" + std::string(wd) + "'", line_number,
                               schema.weekday);
    int weekday = *named_weekday;
    int computed = weekday_of(t.year, t.month, t.day);
    if (weekday != computed)
        throw InvalidDateError("weekday '" + std::string(wd) + "' contradicts date " +
                                   std::to_string(t.year) + "-" + std::to_string(t.month) + "-" +
                                   std::to_string(t.day),
                               line_number, schema.weekday);
    t.weekday = weekday;
    return c;
}

std::string serialize_checkin(const CheckIn& c, const CheckinSchema& schema) {
    std::vector<std::string> fields(static_cast<std::size_t>(schema.field_count));
    char buf[64];
    fields[schema.user] = c.user_id;
    fields[schema.poi] = c.poi_id;
    fields[schema.category] = c.category_id;
    fields[schema.category_name] = c.category_name;
    std::snprintf(buf, sizeof buf, "%.17g", c.latitude);
    fields[schema.latitude] = buf;
    std::snprintf(buf, sizeof buf, "%.17g", c.longitude);
    fields[schema.longitude] = buf;
    fields[schema.weekday] = weekday_name(c.time.weekday);
    fields[schema.year] = std::to_string(c.time.year);
    fields[schema.month] = month_name(c.time.month);
    fields[schema.day] = std::to_string(c.time.day);
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", c.time.hour, c.time.minute, c.time.second);
    fields[schema.time] = buf;

    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += '\t';
        out += fields[i];
    }
    return out;
}

}  // namespace ucvf
