#include "ucvf/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "ucvf/checkin.hpp"
#include "ucvf/errors.hpp"

namespace ucvf {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double deg = std::numbers::pi / 180.0;
    double phi1 = lat1 * deg, phi2 = lat2 * deg;
    double dphi = (lat2 - lat1) * deg;
    double dlam = (lon2 - lon1) * deg;
    double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
               std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
    if (a > 1.0) a = 1.0;
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(a));
}

namespace {

constexpr int kNightEndHour = 5;  // night window is 00:00..05:59

using CellKey = std::pair<long long, long long>;

CellKey cell_of(double lat, double lon) {
    return {static_cast<long long>(std::floor(lat * 1000.0)),
            static_cast<long long>(std::floor(lon * 1000.0))};
}

}  // namespace

HomeLocation estimate_home(const std::string& user_id, const std::vector<CheckIn>& checkins) {
    if (checkins.empty())
        throw MissingHomeError("no check-ins to estimate a home for user " + user_id);

    std::vector<const CheckIn*> pool;
    for (const auto& c : checkins)
        if (c.time.hour <= kNightEndHour) pool.push_back(&c);
    if (pool.empty())
        for (const auto& c : checkins) pool.push_back(&c);

    std::map<CellKey, std::vector<std::pair<double, double>>> cells;
    for (const CheckIn* c : pool)
        cells[cell_of(c->latitude, c->longitude)].emplace_back(c->latitude, c->longitude);

    // map order is ascending, so scanning with a strict > keeps the smallest
    // key among equally populated cells.
    const std::vector<std::pair<double, double>>* best = nullptr;
    std::size_t best_n = 0;
    for (const auto& [key, pts] : cells) {
        if (pts.size() > best_n) {
            best_n = pts.size();
            best = &pts;
        }
    }

    // Summation order is pinned by sorting the points, so the centroid does
    // not depend on input order.
    std::vector<std::pair<double, double>> pts = *best;
    std::sort(pts.begin(), pts.end());
    double sum_lat = 0.0, sum_lon = 0.0;
    for (const auto& [la, lo] : pts) {
        sum_lat += la;
        sum_lon += lo;
    }
    HomeLocation home;
    home.user_id = user_id;
    home.latitude = sum_lat / static_cast<double>(pts.size());
    home.longitude = sum_lon / static_cast<double>(pts.size());
    home.support_count = static_cast<int>(pts.size());
    return home;
}

HomeMap estimate_homes(const std::map<std::string, std::vector<CheckIn>>& by_user) {
    HomeMap homes;
    for (const auto& [user, checkins] : by_user)
        homes.emplace(user, estimate_home(user, checkins));
    return homes;
}

}  // namespace ucvf
