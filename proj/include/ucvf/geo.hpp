#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ucvf {

struct CheckIn;

// Mean Earth radius in km, shared by every distance computation.
inline constexpr double kEarthRadiusKm = 6371.0;

// Great-circle distance between two (lat, lon) points in degrees.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

struct HomeLocation {
    std::string user_id;
    double latitude = 0.0;
    double longitude = 0.0;
    // Number of check-ins in the grid cell the home was taken from.
    int support_count = 0;
};

// Estimates a user's home as the centroid of the most populated 0.001-degree
// grid cell among night check-ins (hours 0..5). Falls back to all check-ins
// when the user has no night activity. Cell ties resolve to the smallest
// (lat_cell, lon_cell) key. Throws MissingHomeError when checkins is empty.
HomeLocation estimate_home(const std::string& user_id, const std::vector<CheckIn>& checkins);

using HomeMap = std::map<std::string, HomeLocation>;

HomeMap estimate_homes(const std::map<std::string, std::vector<CheckIn>>& by_user);

}  // namespace ucvf
