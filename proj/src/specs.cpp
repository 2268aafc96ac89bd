#include "ucvf/specs.hpp"

#include "ucvf/checkin.hpp"
#include "ucvf/errors.hpp"
#include "ucvf/geo.hpp"
#include "ucvf/hierarchy.hpp"

namespace ucvf {

ContextSpec ContextSpec::time() { return {ContextKind::Time, kTimeBucketCount, "time"}; }

ContextSpec ContextSpec::distance() {
    return {ContextKind::Distance, kDistanceBucketCount, "distance"};
}

ViewSpec ViewSpec::root(const CategoryHierarchy& h) {
    return {ViewKind::Root, h.root_count(), "root"};
}

ViewSpec ViewSpec::leaf(const CategoryHierarchy& h) {
    return {ViewKind::Leaf, h.leaf_count(), "leaf"};
}

std::vector<PairSpec> canonical_pairs(const CategoryHierarchy& h) {
    return {
        {ContextSpec::time(), ViewSpec::root(h)},
        {ContextSpec::time(), ViewSpec::leaf(h)},
        {ContextSpec::distance(), ViewSpec::root(h)},
        {ContextSpec::distance(), ViewSpec::leaf(h)},
    };
}

ContextSpec context_spec_for(ContextKind kind) {
    return kind == ContextKind::Time ? ContextSpec::time() : ContextSpec::distance();
}

int bucketize_time(const Timestamp& t) { return t.hour; }

int bucketize_distance(double distance_km) {
    if (distance_km < kDistanceBandEdges[0]) return 0;
    if (distance_km < kDistanceBandEdges[1]) return 1;
    if (distance_km < kDistanceBandEdges[2]) return 2;
    return 3;
}

int context_value(const CheckIn& c, ContextKind kind, const HomeLocation& home) {
    if (kind == ContextKind::Time) return bucketize_time(c.time);
    double d = haversine_km(c.latitude, c.longitude, home.latitude, home.longitude);
    return bucketize_distance(d);
}

int view_label(const CheckIn& c, ViewKind kind, const CategoryHierarchy& h) {
    int leaf = h.leaf_index_by_id(c.category_id);
    return kind == ViewKind::Leaf ? leaf : h.root_of_leaf(leaf);
}

}  // namespace ucvf
