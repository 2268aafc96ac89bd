#include "ucvf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ucvf/errors.hpp"
#include "ucvf/specs.hpp"
#include "ucvf/timeutil.hpp"

namespace ucvf {
namespace {

double next_u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int next_below(std::mt19937_64& rng, int n) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

constexpr const char* kRootNames[9] = {
    "Arts & Entertainment",
    "College & University",
    "Food",
    "Great Outdoors",
    "Nightlife Spot",
    "Professional & Other Places",
    "Residence",
    "Shop & Service",
    "Travel & Transport",
};

// Kilometres per degree of latitude, and of longitude at the equator.
constexpr double kKmPerDegLat = 110.574;
constexpr double kKmPerDegLon = 111.320;

// Radial placement ranges per distance band, kept clear of the 1/10/30 km
// edges so the equirectangular offset cannot leak across a band boundary.
constexpr double kBandRadiusLo[4] = {0.1, 1.5, 11.0, 32.0};
constexpr double kBandRadiusHi[4] = {0.8, 8.5, 28.0, 58.0};

struct UserPlan {
    std::string user_id;
    int pair_index = 0;
    double noise = 0.0;
    double rotate_fraction = 0.0;
    double home_lat = 0.0;
    double home_lon = 0.0;
    int anchor_leaf = 0;
    std::vector<int> planted_slots;   // per event: planted context value
    std::vector<int> other_base;      // per event: un-planted context value
    std::vector<char> other_rotates;  // per event: shifts with the month
    std::vector<int> schedule;        // planted context value -> label index
};

}  // namespace

void SynthSpec::validate() const {
    if (groups.empty()) throw InvalidSpecError("synthetic spec has no groups");
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.pair_index < 0 || g.pair_index >= kPairCount)
            throw InvalidSpecError("group pair index out of range");
        if (g.user_count == 0)
            throw InvalidSpecError("group user count must be positive");
        if (!(g.noise >= 0.0 && g.noise <= 1.0))
            throw InvalidSpecError("group noise must lie in [0, 1]");
        total += g.user_count;
    }
    if (total == 0) throw InvalidSpecError("cohort is empty");
    if (months < 1) throw InvalidSpecError("months must be positive");
    if (start_month < 1 || start_month > 12)
        throw InvalidSpecError("start month must lie in 1..12");
    if (start_year < 1600 || start_year > 9999)
        throw InvalidSpecError("start year out of range");
    if (checkins_per_month < 1)
        throw InvalidSpecError("checkins per month must be positive");
    if (anchors_per_month < 0)
        throw InvalidSpecError("anchors per month must be non-negative");
    if (!(noise_spread >= 0.0 && noise_spread <= 1.0))
        throw InvalidSpecError("noise spread must lie in [0, 1]");
}

CategoryHierarchy default_synthetic_hierarchy() {
    std::vector<std::pair<std::string, std::string>> hierarchy_rows;
    std::vector<std::pair<std::string, std::string>> label_rows;
    int leaf_counter = 0;
    for (int r = 0; r < 9; ++r) {
        const int leaves = (r < 2) ? 8 : 7;
        for (int k = 1; k <= leaves; ++k) {
            char id[16];
            std::snprintf(id, sizeof(id), "cat_%02d", leaf_counter++);
            std::string label = std::string(kRootNames[r]) + " Venue " + std::to_string(k);
            hierarchy_rows.emplace_back(id, kRootNames[r]);
            label_rows.emplace_back(id, std::move(label));
        }
    }
    return CategoryHierarchy::from_lists(hierarchy_rows, label_rows);
}

SynthData generate_synthetic(const SynthSpec& spec) {
    spec.validate();

    SynthData out;
    out.hierarchy = default_synthetic_hierarchy();
    const CategoryHierarchy& h = out.hierarchy;

    const int root_count = static_cast<int>(h.roots().size());
    const int leaf_count = static_cast<int>(h.leaves().size());
    std::vector<std::vector<int>> leaves_of_root(root_count);
    for (int l = 0; l < leaf_count; ++l)
        leaves_of_root[h.root_of_leaf(l)].push_back(l);

    std::mt19937_64 rng(spec.seed);

    std::size_t total_users = 0;
    for (const auto& g : spec.groups) total_users += g.user_count;
    int id_width = 1;
    for (std::size_t v = total_users; v >= 10; v /= 10) ++id_width;
    if (id_width < 4) id_width = 4;

    // Per-user plans are drawn first, in group order, so the event loop can
    // walk months in the outer loop without disturbing determinism.
    std::vector<UserPlan> plans;
    plans.reserve(total_users);
    const int v_events = spec.checkins_per_month;
    std::size_t uid = 0;
    for (const auto& g : spec.groups) {
        const bool planted_time = g.pair_index < 2;
        const bool view_root = g.pair_index % 2 == 0;
        const int planted_card = planted_time ? kTimeBucketCount : kDistanceBucketCount;
        const int other_card = planted_time ? kDistanceBucketCount : kTimeBucketCount;
        const int label_card = view_root ? root_count : leaf_count;

        const std::size_t group_head = plans.size();
        for (std::size_t k = 0; k < g.user_count; ++k, ++uid) {
            UserPlan p;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "u%0*zu", id_width, uid);
            p.user_id = buf;
            p.pair_index = g.pair_index;
            const double frac = g.user_count > 1
                ? static_cast<double>(k) / static_cast<double>(g.user_count - 1)
                : 0.5;
            p.noise = std::clamp(g.noise * (1.0 + spec.noise_spread * (2.0 * frac - 1.0)), 0.0, 1.0);
            p.rotate_fraction = 0.35 + 0.3 * frac;
            p.home_lat = 40.7 + (next_u01(rng) - 0.5) * 0.3;
            p.home_lon = -73.9 + (next_u01(rng) - 0.5) * 0.3;
            const bool copy_shared = spec.shared_schedule && k > 0;
            if (copy_shared) {
                const UserPlan& head = plans[group_head];
                p.anchor_leaf = head.anchor_leaf;
                p.planted_slots = head.planted_slots;
                p.schedule = head.schedule;
            } else {
                p.anchor_leaf = next_below(rng, leaf_count);
                p.planted_slots.resize(v_events);
            }
            p.other_base.resize(v_events);
            p.other_rotates.resize(v_events);
            for (int j = 0; j < v_events; ++j) {
                if (!copy_shared) p.planted_slots[j] = next_below(rng, planted_card);
                p.other_base[j] = next_below(rng, other_card);
                p.other_rotates[j] = next_u01(rng) < p.rotate_fraction ? 1 : 0;
            }
            if (!copy_shared) {
                p.schedule.resize(planted_card);
                for (int c = 0; c < planted_card; ++c)
                    p.schedule[c] = next_below(rng, label_card);
            }
            plans.push_back(std::move(p));
        }
    }

    std::size_t poi_counter = 0;
    auto place_poi = [&](const UserPlan& p, int band, double& lat, double& lon) {
        const double radius =
            kBandRadiusLo[band] + (kBandRadiusHi[band] - kBandRadiusLo[band]) * next_u01(rng);
        const double bearing = 2.0 * std::numbers::pi * next_u01(rng);
        lat = p.home_lat + radius * std::cos(bearing) / kKmPerDegLat;
        lon = p.home_lon +
              radius * std::sin(bearing) / (kKmPerDegLon * std::cos(p.home_lat * std::numbers::pi / 180.0));
    };

    auto emit = [&](const UserPlan& p, int year, int month, int day, int hour,
                    int minute, int second, int leaf, const std::string& poi,
                    double lat, double lon) {
        CheckIn c;
        c.user_id = p.user_id;
        c.poi_id = poi;
        c.category_id = h.leaf_id(leaf);
        c.category_name = h.leaf_name(leaf);
        c.latitude = lat;
        c.longitude = lon;
        c.time.year = year;
        c.time.month = month;
        c.time.day = day;
        c.time.hour = hour;
        c.time.minute = minute;
        c.time.second = second;
        c.time.weekday = weekday_of(year, month, day);
        out.checkins.push_back(std::move(c));
    };

    for (const auto& p : plans) {
        const bool planted_time = p.pair_index < 2;
        const bool view_root = p.pair_index % 2 == 0;
        const int planted_card = planted_time ? kTimeBucketCount : kDistanceBucketCount;
        const int other_card = planted_time ? kDistanceBucketCount : kTimeBucketCount;

        for (int mi = 0; mi < spec.months; ++mi) {
            const int month0 = spec.start_month - 1 + mi;
            const int year = spec.start_year + month0 / 12;
            const int month = month0 % 12 + 1;

            for (int a = 0; a < spec.anchors_per_month; ++a) {
                const int day = 1 + next_below(rng, 28);
                const int minute = next_below(rng, 60);
                const int second = next_below(rng, 60);
                emit(p, year, month, day, 2, minute, second, p.anchor_leaf,
                     "home_" + p.user_id, p.home_lat, p.home_lon);
            }

            for (int j = 0; j < v_events; ++j) {
                const int day = 1 + next_below(rng, 28);
                const int minute = next_below(rng, 60);
                const int second = next_below(rng, 60);
                int planted_value;
                int other_value;
                int leaf;
                if (next_u01(rng) < p.noise) {
                    planted_value = next_below(rng, planted_card);
                    other_value = next_below(rng, other_card);
                    if (view_root) {
                        const int root = next_below(rng, root_count);
                        const auto& pool = leaves_of_root[root];
                        leaf = pool[static_cast<std::size_t>(
                            next_below(rng, static_cast<int>(pool.size())))];
                    } else {
                        leaf = next_below(rng, leaf_count);
                    }
                } else {
                    planted_value = p.planted_slots[j];
                    other_value = p.other_rotates[j]
                        ? (p.other_base[j] + mi) % other_card
                        : p.other_base[j];
                    if (view_root) {
                        // One leaf per (slot, month), cycling through the
                        // scheduled root's pool. Concentrating each slot's
                        // mass keeps the monthly shift visible in aggregate
                        // even when many events share a context bucket.
                        const auto& pool = leaves_of_root[p.schedule[planted_value]];
                        leaf = pool[static_cast<std::size_t>(
                            (planted_value + mi) % static_cast<int>(pool.size()))];
                    } else {
                        leaf = p.schedule[planted_value];
                    }
                }
                const int hour = planted_time ? planted_value : other_value;
                const int band = planted_time ? other_value : planted_value;
                double lat;
                double lon;
                place_poi(p, band, lat, lon);
                char poi[24];
                std::snprintf(poi, sizeof(poi), "p%07zu", poi_counter++);
                emit(p, year, month, day, hour, minute, second, leaf, poi, lat, lon);
            }
        }
        out.truth.push_back({p.user_id, p.pair_index, p.noise});
    }

    std::sort(out.truth.begin(), out.truth.end(),
              [](const SynthTruth& a, const SynthTruth& b) { return a.user_id < b.user_id; });
    return out;
}

void write_synthetic_dataset(const SynthData& data, const std::string& tsv_path) {
    std::ofstream out(tsv_path);
    if (!out) throw IoError("cannot open " + tsv_path + " for writing");
    out << "U\tP\tPC\tPCN\tLO\tLA\tW\tY\tM\tD\tT\n";
    for (const auto& c : data.checkins) out << serialize_checkin(c) << '\n';
    if (!out) throw IoError("failed while writing " + tsv_path);
}

void write_truth_file(const SynthData& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "user_id,pair,noise\n";
    char buf[64];
    static const char* const kPairIds[kPairCount] = {"time_root", "time_leaf", "distance_root",
                                                     "distance_leaf"};
    for (const auto& t : data.truth) {
        std::snprintf(buf, sizeof(buf), "%.6g", t.noise);
        out << t.user_id << ',' << kPairIds[t.pair_index] << ',' << buf << '\n';
    }
    if (!out) throw IoError("failed while writing " + path);
}

}  // namespace ucvf
