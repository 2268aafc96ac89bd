#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucvf/checkin.hpp"
#include "ucvf/hierarchy.hpp"

namespace ucvf {

// One cohort group: users planted to be regular in one (context, view) pair.
struct GroupProfile {
    int pair_index = 0;          // canonical pair the group is regular in
    std::size_t user_count = 0;
    double noise = 0.1;          // group-level deviation rate in [0, 1]
};

struct SynthSpec {
    std::vector<GroupProfile> groups;
    int months = 6;
    int start_year = 2012;
    int start_month = 1;  // 1..12
    // Scheduled events per user per month; months have equal volume so raw
    // count differences reflect regularity rather than volume.
    int checkins_per_month = 120;
    // Additional constant home check-ins per month (hour 2, at the exact
    // home point). They pin home estimation and add zero month-to-month
    // variation to every pair.
    int anchors_per_month = 6;
    // Per-user noise spans noise*(1 +/- spread) linearly across each group,
    // giving the accuracy-vs-stability analyses an intra-group gradient.
    double noise_spread = 0.2;
    // When set, the planted slot sequence, the slot-to-category schedule and
    // the anchor category are drawn once per group and reused by every user
    // in it. Homes, noise rates and the un-planted dimension stay per-user.
    // Shared schedules give a pooled model structure it can transfer across
    // users while each single user's own history stays sparse.
    bool shared_schedule = false;
    std::uint64_t seed = 1;

    void validate() const;  // throws InvalidSpecError
};

struct SynthTruth {
    std::string user_id;
    int pair_index = 0;
    double noise = 0.0;  // effective per-user rate
};

struct SynthData {
    CategoryHierarchy hierarchy;
    std::vector<CheckIn> checkins;  // generation order
    std::vector<SynthTruth> truth;  // ascending user id
};

// Nine root categories with 65 leaves, the canonical taxonomy shape.
CategoryHierarchy default_synthetic_hierarchy();

// Deterministic for a fixed spec. Regular users draw (planted context
// value, category) from a fixed per-user schedule with probability
// 1 - noise and uniformly otherwise; the schedule is replayed every month so
// a noise-free user's planted pair has difference value exactly zero. The
// un-planted context dimension and, for root-regular users, the leaf choice
// within the scheduled root follow fixed per-user patterns that shift with
// the month, so every non-planted pair shows large month-to-month variation.
SynthData generate_synthetic(const SynthSpec& spec);

// Tab-separated check-in file in the 11-column layout, header included.
void write_synthetic_dataset(const SynthData& data, const std::string& tsv_path);

// Per-user rows: user_id, pair id, effective noise.
void write_truth_file(const SynthData& data, const std::string& path);

}  // namespace ucvf
