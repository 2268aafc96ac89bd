#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ucvf {

class CategoryHierarchy;
struct Dataset;
struct HomeLocation;

// Shannon entropy in bits of an explicit distribution. Entries must be
// nonnegative and are used as-is (no renormalisation); zero entries
// contribute nothing. Throws EmptySampleError when the vector is empty or
// sums to zero.
double entropy(const std::vector<double>& probs);

// Entropy of the empirical distribution given by nonnegative counts.
double entropy_from_counts(const std::vector<std::int64_t>& counts);

// One observation for the influence computation: which bucket of the
// context it fell into and which category label it carries.
struct LabeledSample {
    int context_value = 0;
    int view_label = 0;
};

// Entropy of the label marginal of the sample set.
double sample_entropy(const std::vector<LabeledSample>& samples);

// Reduction in label entropy from conditioning on the context value:
// H(labels) minus the sample-weighted mean of per-bucket label entropies.
// Throws EmptySampleError on an empty sample set.
double information_gain(const std::vector<LabeledSample>& samples);

// information_gain / sample_entropy. Throws ZeroEntropyError when the label
// marginal has zero entropy (single label), since the ratio is undefined.
double gain_ratio(const std::vector<LabeledSample>& samples);

struct InfluenceResult {
    std::string context;  // "time" or "distance"
    std::string view;     // "root" or "leaf"
    double entropy = 0.0;
    double gain = 0.0;
    double gain_ratio = 0.0;
    bool selected = false;
};

// Scores every context/view combination over the pooled dataset and marks
// the ones whose gain ratio reaches delta. A zero-entropy view yields
// ratio 0 and is never selected. Results come in the fixed order
// time_root, time_leaf, distance_root, distance_leaf.
std::vector<InfluenceResult> influence_analysis(const Dataset& ds,
                                                const std::map<std::string, HomeLocation>& homes,
                                                const CategoryHierarchy& h, double delta = 0.1);

}  // namespace ucvf
