#include "ucvf/applicability.hpp"

#include <algorithm>
#include <cmath>

#include "ucvf/dataset.hpp"
#include "ucvf/errors.hpp"
#include "ucvf/timeutil.hpp"

namespace ucvf {

std::vector<std::vector<const Record*>> split_by_period(const std::vector<Record>& records,
                                                        TimeUnit unit) {
    if (records.empty()) throw NoDataError("cannot slice an empty history");
    std::map<std::pair<int, int>, std::vector<const Record*>> groups;
    for (const auto& r : records) {
        std::pair<int, int> key;
        if (unit == TimeUnit::Month) {
            key = {r.checkin.time.year, r.checkin.time.month};
        } else {
            IsoWeek w = iso_week_of(r.checkin.time.year, r.checkin.time.month, r.checkin.time.day);
            key = {w.year, w.week};
        }
        groups[key].push_back(&r);
    }
    std::vector<std::vector<const Record*>> out;
    out.reserve(groups.size());
    for (auto& [key, recs] : groups) out.push_back(std::move(recs));
    return out;
}

double difference_value(const std::vector<FeatureMatrix>& period_matrices) {
    if (period_matrices.empty())
        throw NoDataError("difference value of an empty matrix sequence");
    const FeatureMatrix& first = period_matrices.front();
    std::size_t n_cells = first.values.size();
    for (const auto& m : period_matrices)
        if (m.rows != first.rows || m.cols != first.cols || m.values.size() != n_cells)
            throw ShapeMismatchError("period matrices for user " + first.user_id +
                                     " differ in shape");

    std::vector<double> mean(n_cells, 0.0);
    for (const auto& m : period_matrices)
        for (std::size_t i = 0; i < n_cells; ++i) mean[i] += m.values[i];
    double inv = 1.0 / static_cast<double>(period_matrices.size());
    for (double& v : mean) v *= inv;

    double d = 0.0;
    for (const auto& m : period_matrices)
        for (std::size_t i = 0; i < n_cells; ++i) d += std::fabs(m.values[i] - mean[i]);
    return d;
}

std::map<std::string, int> rank_users(const std::map<std::string, double>& diffs) {
    std::vector<std::pair<double, std::string>> order;
    order.reserve(diffs.size());
    for (const auto& [user, d] : diffs) order.emplace_back(d, user);
    std::sort(order.begin(), order.end());
    std::map<std::string, int> ranks;
    for (std::size_t i = 0; i < order.size(); ++i)
        ranks[order[i].second] = static_cast<int>(i) + 1;
    return ranks;
}

ApplicabilityResult assign_users(const std::vector<DifferenceRecord>& records, int pair_count) {
    if (pair_count <= 0) throw InvalidConfigError("assignment needs at least one pair");
    std::vector<std::map<std::string, double>> diffs(static_cast<std::size_t>(pair_count));
    std::map<std::string, int> seen;
    for (const auto& r : records) {
        if (r.pair_index < 0 || r.pair_index >= pair_count)
            throw MissingRecordError("difference record for user " + r.user_id +
                                     " names pair index " + std::to_string(r.pair_index));
        if (!diffs[static_cast<std::size_t>(r.pair_index)].emplace(r.user_id, r.sum_diff).second)
            throw MissingRecordError("duplicate difference record for user " + r.user_id +
                                     " pair " + std::to_string(r.pair_index));
        ++seen[r.user_id];
    }
    for (const auto& [user, n] : seen)
        if (n != pair_count)
            throw MissingRecordError("user " + user + " has " + std::to_string(n) +
                                     " difference records, expected " +
                                     std::to_string(pair_count));

    std::vector<std::map<std::string, int>> ranks(static_cast<std::size_t>(pair_count));
    for (int p = 0; p < pair_count; ++p)
        ranks[static_cast<std::size_t>(p)] = rank_users(diffs[static_cast<std::size_t>(p)]);

    ApplicabilityResult result;
    result.pair_counts.assign(static_cast<std::size_t>(pair_count), 0);
    result.assignments.reserve(seen.size());
    for (const auto& [user, n] : seen) {
        ApplicabilityAssignment a;
        a.user_id = user;
        a.diff.resize(static_cast<std::size_t>(pair_count));
        a.rank.resize(static_cast<std::size_t>(pair_count));
        int best = 0;
        for (int p = 0; p < pair_count; ++p) {
            a.diff[static_cast<std::size_t>(p)] = diffs[static_cast<std::size_t>(p)][user];
            a.rank[static_cast<std::size_t>(p)] = ranks[static_cast<std::size_t>(p)][user];
            if (a.rank[static_cast<std::size_t>(p)] < a.rank[static_cast<std::size_t>(best)])
                best = p;
        }
        a.assigned_pair = best;
        ++result.pair_counts[static_cast<std::size_t>(best)];
        result.assignments.push_back(std::move(a));
    }
    return result;
}

ApplicabilityResult compute_applicability(const Dataset& ds,
                                          const std::map<std::string, HomeLocation>& homes,
                                          const std::vector<PairSpec>& pairs, TimeUnit unit,
                                          bool normalize_periods) {
    if (pairs.empty()) throw InvalidConfigError("applicability needs at least one pair");

    std::vector<DifferenceRecord> records;
    records.reserve(ds.by_user.size() * pairs.size());
    std::map<std::string, int> period_counts;
    for (const auto& [user, recs] : ds.by_user) {
        auto hit = homes.find(user);
        if (hit == homes.end()) throw MissingHomeError("no home location for user " + user);
        auto periods = split_by_period(recs, unit);
        period_counts[user] = static_cast<int>(periods.size());
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            std::vector<FeatureMatrix> mats;
            mats.reserve(periods.size());
            for (const auto& group : periods) {
                FeatureMatrix m = build_ucvf(user, group, pairs[p], hit->second);
                mats.push_back(normalize_periods ? normalize_matrix(m) : std::move(m));
            }
            records.push_back({user, static_cast<int>(p), difference_value(mats)});
        }
    }

    ApplicabilityResult result = assign_users(records, static_cast<int>(pairs.size()));
    for (auto& a : result.assignments) {
        a.period_count = period_counts[a.user_id];
        if (a.period_count == 1) ++result.single_period_users;
    }
    return result;
}

}  // namespace ucvf
