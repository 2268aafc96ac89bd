#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ucvf/dataset.hpp"
#include "ucvf/features.hpp"
#include "ucvf/geo.hpp"
#include "ucvf/specs.hpp"
#include "ucvf/synth.hpp"
#include "ucvf/timeutil.hpp"

using namespace ucvf;

namespace {

Record make_record(const CategoryHierarchy& h, double lat, double lon, int hour, int leaf,
                   int day = 1, int month = 4) {
    Record r;
    r.checkin.user_id = "u1";
    r.checkin.poi_id = "p1";
    r.checkin.category_id = h.leaf_id(leaf);
    r.checkin.category_name = h.leaf_name(leaf);
    r.checkin.latitude = lat;
    r.checkin.longitude = lon;
    r.checkin.time = {2012, month, day, hour, 0, 0, weekday_of(2012, month, day)};
    r.leaf_label = leaf;
    r.root_label = h.root_of_leaf(leaf);
    return r;
}

std::vector<Record> random_records(const CategoryHierarchy& h, std::mt19937_64& rng, int n) {
    std::vector<Record> out;
    for (int i = 0; i < n; ++i) {
        double lat = 40.0 + static_cast<double>(rng() % 1000) / 1000.0;
        double lon = -74.0 + static_cast<double>(rng() % 1000) / 1000.0;
        int hour = static_cast<int>(rng() % 24);
        int leaf = static_cast<int>(rng() % static_cast<unsigned>(h.leaf_count()));
        int day = 1 + static_cast<int>(rng() % 28);
        int month = 1 + static_cast<int>(rng() % 12);
        out.push_back(make_record(h, lat, lon, hour, leaf, day, month));
    }
    return out;
}

std::string temp_path(const char* name) {
    return std::string("/tmp/ucvf_test_") + name + "_" + std::to_string(getpid());
}

}  // namespace

TEST_CASE("every matrix conserves the record count") {
    CategoryHierarchy h = default_synthetic_hierarchy();
    auto pairs = canonical_pairs(h);
    HomeLocation home{"u1", 40.5, -73.5, 1};
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto records = random_records(h, rng, 1 + static_cast<int>(rng() % 200));
        for (const auto& pair : pairs) {
            FeatureMatrix m = build_ucvf("u1", records, pair, home);
            CHECK(m.rows == pair.context.bucket_count);
            CHECK(m.cols == pair.view.label_count);
            CHECK(m.total() == static_cast<double>(records.size()));
        }
    }
}

TEST_CASE("counting is additive over disjoint record sets") {
    CategoryHierarchy h = default_synthetic_hierarchy();
    auto pairs = canonical_pairs(h);
    HomeLocation home{"u1", 40.5, -73.5, 1};
    std::mt19937_64 rng(12);
    auto a = random_records(h, rng, 60);
    auto b = random_records(h, rng, 40);
    std::vector<Record> both = a;
    both.insert(both.end(), b.begin(), b.end());
    for (const auto& pair : pairs) {
        FeatureMatrix ma = build_ucvf("u1", a, pair, home);
        FeatureMatrix mb = build_ucvf("u1", b, pair, home);
        FeatureMatrix mu = build_ucvf("u1", both, pair, home);
        for (std::size_t i = 0; i < mu.values.size(); ++i)
            CHECK(mu.values[i] == ma.values[i] + mb.values[i]);
    }
}

TEST_CASE("a known record lands in the right cell") {
    CategoryHierarchy h = default_synthetic_hierarchy();
    auto pairs = canonical_pairs(h);
    HomeLocation home{"u1", 40.0, -73.0, 1};
    // Roughly 111 km north of home at 14:00, leaf 7.
    std::vector<Record> recs = {make_record(h, 41.0, -73.0, 14, 7)};
    FeatureMatrix tr = build_ucvf("u1", recs, pairs[0], home);
    CHECK(tr.at(14, h.root_of_leaf(7)) == 1.0);
    FeatureMatrix dl = build_ucvf("u1", recs, pairs[3], home);
    CHECK(dl.at(3, 7) == 1.0);
}

TEST_CASE("normalisation yields unit mass and keeps zeros") {
    CategoryHierarchy h = default_synthetic_hierarchy();
    auto pairs = canonical_pairs(h);
    HomeLocation home{"u1", 40.5, -73.5, 1};
    std::mt19937_64 rng(13);
    auto records = random_records(h, rng, 50);
    FeatureMatrix m = normalize_matrix(build_ucvf("u1", records, pairs[1], home));
    CHECK(m.total() == doctest::Approx(1.0).epsilon(1e-12));

    FeatureMatrix empty;
    empty.user_id = "u1";
    empty.context = "time";
    empty.view = "root";
    empty.rows = 2;
    empty.cols = 2;
    empty.values.assign(4, 0.0);
    FeatureMatrix still_empty = normalize_matrix(empty);
    for (double v : still_empty.values) CHECK(v == 0.0);
}

TEST_CASE("ufs builder returns the pairs in canonical order") {
    CategoryHierarchy h = default_synthetic_hierarchy();
    auto pairs = canonical_pairs(h);
    HomeLocation home{"u1", 40.5, -73.5, 1};
    std::mt19937_64 rng(14);
    auto records = random_records(h, rng, 30);
    auto mats = build_ufs_for_user("u1", records, pairs, home);
    REQUIRE(mats.size() == 4);
    CHECK(mats[0].context == "time");
    CHECK(mats[0].view == "root");
    CHECK(mats[3].context == "distance");
    CHECK(mats[3].view == "leaf");
}

TEST_CASE("matrix files round-trip exactly") {
    CategoryHierarchy h = default_synthetic_hierarchy();
    auto pairs = canonical_pairs(h);
    HomeLocation home{"u1", 40.5, -73.5, 1};
    std::mt19937_64 rng(15);
    auto records = random_records(h, rng, 75);
    std::vector<FeatureMatrix> mats;
    for (const auto& pair : pairs)
        mats.push_back(normalize_matrix(build_ucvf("u1", records, pair, home)));

    std::string path = temp_path("matrix_roundtrip");
    write_matrix_file(path, mats, "round-trip check");
    auto back = read_matrix_file(path);
    std::remove(path.c_str());

    REQUIRE(back.size() == mats.size());
    for (std::size_t i = 0; i < mats.size(); ++i) {
        CHECK(back[i].user_id == mats[i].user_id);
        CHECK(back[i].context == mats[i].context);
        CHECK(back[i].view == mats[i].view);
        CHECK(back[i].rows == mats[i].rows);
        CHECK(back[i].cols == mats[i].cols);
        REQUIRE(back[i].values.size() == mats[i].values.size());
        for (std::size_t j = 0; j < mats[i].values.size(); ++j)
            CHECK(back[i].values[j] == mats[i].values[j]);
    }
}
