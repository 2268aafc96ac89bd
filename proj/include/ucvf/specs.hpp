#pragma once

#include <string>
#include <vector>

namespace ucvf {

class CategoryHierarchy;
struct CheckIn;
struct HomeLocation;
struct Timestamp;

enum class ContextKind { Time, Distance };
enum class ViewKind { Root, Leaf };

// Distance band upper edges in km; the last band is open-ended.
// Bands: [0,1), [1,10), [10,30), [30,inf).
inline constexpr double kDistanceBandEdges[] = {1.0, 10.0, 30.0};
inline constexpr int kTimeBucketCount = 24;
inline constexpr int kDistanceBucketCount = 4;

struct ContextSpec {
    ContextKind kind = ContextKind::Time;
    int bucket_count = 0;
    std::string name;  // "time" or "distance"

    static ContextSpec time();
    static ContextSpec distance();
};

struct ViewSpec {
    ViewKind kind = ViewKind::Root;
    int label_count = 0;
    std::string name;  // "root" or "leaf"

    static ViewSpec root(const CategoryHierarchy& h);
    static ViewSpec leaf(const CategoryHierarchy& h);
};

// One (context, view) combination. The id doubles as the artifact filename
// fragment, e.g. "time_root".
struct PairSpec {
    ContextSpec context;
    ViewSpec view;

    std::string id() const { return context.name + "_" + view.name; }
};

// The four combinations in their fixed order: time_root, time_leaf,
// distance_root, distance_leaf. Indices into this vector are used as the
// pair index everywhere downstream.
std::vector<PairSpec> canonical_pairs(const CategoryHierarchy& h);

inline constexpr int kPairCount = 4;

ContextSpec context_spec_for(ContextKind kind);

// Hour of day, 0..23.
int bucketize_time(const Timestamp& t);

// Band index 0..3 for a nonnegative distance in km.
int bucketize_distance(double distance_km);

// Bucket of a check-in under the given context. Distance contexts measure
// from the user's home location.
int context_value(const CheckIn& c, ContextKind kind, const HomeLocation& home);

// Label index of a check-in under the given view.
int view_label(const CheckIn& c, ViewKind kind, const CategoryHierarchy& h);

}  // namespace ucvf
