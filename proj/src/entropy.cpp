#include "ucvf/entropy.hpp"

#include <cmath>
#include <map>

#include "ucvf/dataset.hpp"
#include "ucvf/errors.hpp"
#include "ucvf/hierarchy.hpp"
#include "ucvf/specs.hpp"

namespace ucvf {

double entropy(const std::vector<double>& probs) {
    if (probs.empty()) throw EmptySampleError("entropy of an empty distribution");
    double total = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw EmptySampleError("negative probability in distribution");
        total += p;
    }
    if (total <= 0.0) throw EmptySampleError("distribution sums to zero");
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

double entropy_from_counts(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    if (counts.empty() || total == 0) throw EmptySampleError("entropy of an empty count vector");
    double h = 0.0;
    for (std::int64_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

std::vector<std::int64_t> label_histogram(const std::vector<LabeledSample>& samples) {
    std::map<int, std::int64_t> counts;
    for (const auto& s : samples) ++counts[s.view_label];
    std::vector<std::int64_t> out;
    out.reserve(counts.size());
    for (const auto& [label, n] : counts) out.push_back(n);
    return out;
}

}  // namespace

double sample_entropy(const std::vector<LabeledSample>& samples) {
    if (samples.empty()) throw EmptySampleError("entropy of an empty sample set");
    return entropy_from_counts(label_histogram(samples));
}

double information_gain(const std::vector<LabeledSample>& samples) {
    if (samples.empty()) throw EmptySampleError("information gain of an empty sample set");
    double base = sample_entropy(samples);
    std::map<int, std::vector<LabeledSample>> buckets;
    for (const auto& s : samples) buckets[s.context_value].push_back(s);
    double conditional = 0.0;
    double n = static_cast<double>(samples.size());
    for (const auto& [value, subset] : buckets)
        conditional += (static_cast<double>(subset.size()) / n) * sample_entropy(subset);
    return base - conditional;
}

double gain_ratio(const std::vector<LabeledSample>& samples) {
    double base = sample_entropy(samples);
    if (base == 0.0)
        throw ZeroEntropyError("gain ratio undefined: label marginal has zero entropy");
    return information_gain(samples) / base;
}

std::vector<InfluenceResult> influence_analysis(const Dataset& ds,
                                                const std::map<std::string, HomeLocation>& homes,
                                                const CategoryHierarchy& h, double delta) {
    // Samples for each combination, in the canonical pair order.
    std::vector<std::vector<LabeledSample>> samples(kPairCount);
    auto pairs = canonical_pairs(h);
    bool any = false;
    for (const auto& [user, recs] : ds.by_user)
        if (!recs.empty()) any = true;
    if (!any) throw EmptyDatasetError("influence analysis needs a non-empty dataset");
    for (const auto& [user, recs] : ds.by_user) {
        auto hit = homes.find(user);
        if (hit == homes.end()) throw MissingHomeError("no home location for user " + user);
        for (const auto& r : recs) {
            int tb = bucketize_time(r.checkin.time);
            int db = context_value(r.checkin, ContextKind::Distance, hit->second);
            samples[0].push_back({tb, r.root_label});
            samples[1].push_back({tb, r.leaf_label});
            samples[2].push_back({db, r.root_label});
            samples[3].push_back({db, r.leaf_label});
        }
    }

    std::vector<InfluenceResult> out;
    out.reserve(kPairCount);
    for (int i = 0; i < kPairCount; ++i) {
        InfluenceResult res;
        res.context = pairs[static_cast<std::size_t>(i)].context.name;
        res.view = pairs[static_cast<std::size_t>(i)].view.name;
        res.entropy = sample_entropy(samples[static_cast<std::size_t>(i)]);
        res.gain = information_gain(samples[static_cast<std::size_t>(i)]);
        if (res.entropy == 0.0) {
            res.gain_ratio = 0.0;
            res.selected = false;
        } else {
            res.gain_ratio = res.gain / res.entropy;
            res.selected = res.gain_ratio > delta;
        }
        out.push_back(res);
    }
    return out;
}

}  // namespace ucvf
