#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ucvf/features.hpp"

namespace ucvf {

struct Dataset;
struct HomeLocation;
struct Record;

// Granularity of the per-user history slices the stability analysis runs on.
enum class TimeUnit { Month, Week };

// Partitions one user's records by calendar month (or ISO week), returning
// the groups in ascending period order. Records inside a group keep their
// input order. Throws NoDataError on an empty history.
std::vector<std::vector<const Record*>> split_by_period(const std::vector<Record>& records,
                                                        TimeUnit unit);

// Stability score of a matrix sequence: the elementwise mean matrix is
// computed over the periods, and the score is the summed L1 distance of
// every period matrix to that mean. Lower means steadier behaviour. Throws
// NoDataError on an empty sequence and ShapeMismatchError when dimensions
// disagree across periods.
double difference_value(const std::vector<FeatureMatrix>& period_matrices);

// One user's stability score under one pair.
struct DifferenceRecord {
    std::string user_id;
    int pair_index = 0;
    double sum_diff = 0.0;
};

struct ApplicabilityAssignment {
    std::string user_id;
    std::vector<double> diff;  // per pair, canonical order
    std::vector<int> rank;     // 1-based rank within each pair's list
    int assigned_pair = 0;     // pair index with the best rank
    int period_count = 0;      // history slices behind the scores (0 if unknown)
};

struct ApplicabilityResult {
    std::vector<ApplicabilityAssignment> assignments;  // ascending user_id
    std::vector<std::size_t> pair_counts;              // users assigned per pair
    // Users whose history spans a single period; their scores are all zero
    // and the assignment is decided purely by tie-breaking.
    std::size_t single_period_users = 0;
};

// Ascending ranks for one pair's difference values; ties break by ascending
// user id, so ranks are a permutation of 1..N. diffs is keyed by user id.
std::map<std::string, int> rank_users(const std::map<std::string, double>& diffs);

// Ranks every pair's list and gives each user the pair where their rank is
// minimal; rank ties across pairs resolve to the lowest pair index. Every
// user must appear exactly once per pair index in [0, pair_count), else
// MissingRecordError.
ApplicabilityResult assign_users(const std::vector<DifferenceRecord>& records, int pair_count);

// Full analysis: per user and pair, slice the history by the time unit,
// build the per-period matrices (normalised first when normalize_periods is
// set), score and rank them, and assign every user to their best pair.
ApplicabilityResult compute_applicability(const Dataset& ds,
                                          const std::map<std::string, HomeLocation>& homes,
                                          const std::vector<PairSpec>& pairs,
                                          TimeUnit unit = TimeUnit::Month,
                                          bool normalize_periods = false);

}  // namespace ucvf
