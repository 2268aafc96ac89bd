#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ucvf/applicability.hpp"
#include "ucvf/checkin.hpp"
#include "ucvf/dataset.hpp"
#include "ucvf/errors.hpp"
#include "ucvf/features.hpp"
#include "ucvf/geo.hpp"
#include "ucvf/hierarchy.hpp"
#include "ucvf/synth.hpp"

using namespace ucvf;

namespace {

std::string temp_path(const char* name) {
    return std::string("/tmp/ucvf_test_") + name + "_" + std::to_string(getpid());
}

const char* kGoodLine =
    "u1\tp1\tcat_3\tArts Venue\t40.7128\t-74.0060\tMon\t2012\tApr\t9\t14:30:05";

std::string with_field(int idx, const std::string& value) {
    std::vector<std::string> fields;
    std::string line = kGoodLine;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    fields[static_cast<std::size_t>(idx)] = value;
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += '\t';
        out += fields[i];
    }
    return out;
}

// Converts the generated check-ins of one user into per-month difference
// values for every canonical pair.
std::vector<double> pair_differences(const SynthData& data, const std::string& user) {
    const CategoryHierarchy& h = data.hierarchy;
    std::vector<Record> records;
    for (const auto& c : data.checkins) {
        if (c.user_id != user) continue;
        Record r;
        r.checkin = c;
        r.leaf_label = h.leaf_index_by_id(c.category_id);
        r.root_label = h.root_of_leaf(r.leaf_label);
        records.push_back(std::move(r));
    }
    REQUIRE(!records.empty());
    std::vector<CheckIn> raw;
    for (const auto& r : records) raw.push_back(r.checkin);
    HomeLocation home = estimate_home(user, raw);

    auto pairs = canonical_pairs(h);
    auto periods = split_by_period(records, TimeUnit::Month);
    std::vector<double> out;
    for (const auto& pair : pairs) {
        std::vector<FeatureMatrix> mats;
        for (const auto& group : periods)
            mats.push_back(build_ucvf(user, group, pair, home));
        out.push_back(difference_value(mats));
    }
    return out;
}

}  // namespace

TEST_CASE("a well-formed line parses field-for-field") {
    CheckIn c = parse_checkin_line(kGoodLine);
    CHECK(c.user_id == "u1");
    CHECK(c.poi_id == "p1");
    CHECK(c.category_id == "cat_3");
    CHECK(c.category_name == "Arts Venue");
    CHECK(c.latitude == 40.7128);
    CHECK(c.longitude == -74.0060);
    CHECK(c.time.year == 2012);
    CHECK(c.time.month == 4);
    CHECK(c.time.day == 9);
    CHECK(c.time.hour == 14);
    CHECK(c.time.minute == 30);
    CHECK(c.time.second == 5);
    CHECK(c.time.weekday == 1);
}

TEST_CASE("serialization round-trips a parsed check-in") {
    CheckIn c = parse_checkin_line(kGoodLine);
    CheckIn back = parse_checkin_line(serialize_checkin(c));
    CHECK(back.user_id == c.user_id);
    CHECK(back.latitude == c.latitude);
    CHECK(back.longitude == c.longitude);
    CHECK(back.time.epoch_seconds() == c.time.epoch_seconds());
}

TEST_CASE("field count, coordinates, dates and weekdays are validated") {
    CHECK_THROWS_AS(parse_checkin_line("u1\tp1\tonly three"), MalformedLineError);
    CHECK_THROWS_AS(parse_checkin_line(std::string(kGoodLine) + "\textra"),
                    MalformedLineError);
    CHECK_THROWS_AS(parse_checkin_line(with_field(4, "not-a-number")),
                    InvalidCoordinateError);
    CHECK_THROWS_AS(parse_checkin_line(with_field(4, "91.0")), InvalidCoordinateError);
    CHECK_THROWS_AS(parse_checkin_line(with_field(5, "-181.0")), InvalidCoordinateError);
    CHECK_THROWS_AS(parse_checkin_line(with_field(9, "31")), InvalidDateError);  // Apr 31
    CHECK_THROWS_AS(parse_checkin_line(with_field(10, "24:00:00")), InvalidDateError);
    // 2012-04-09 was a Monday; claiming Tuesday must fail.
    CHECK_THROWS_AS(parse_checkin_line(with_field(6, "Tue")), InvalidDateError);
    CHECK_THROWS_AS(parse_checkin_line(with_field(8, "Foo")), InvalidDateError);
}

TEST_CASE("truncation markers on coordinate fields are ignored") {
    CheckIn c = parse_checkin_line(with_field(4, "40.7128*"));
    CHECK(c.latitude == 40.7128);
}

TEST_CASE("dataset loading skips bad lines and counts them") {
    CategoryHierarchy h = default_synthetic_hierarchy();
    std::string good1 = "u1\tp1\t" + h.leaf_id(0) + "\t" + h.leaf_name(0) +
                        "\t40.7\t-73.9\tMon\t2012\tApr\t9\t08:00:00";
    std::string good2 = "u2\tp2\t" + h.leaf_id(3) + "\t" + h.leaf_name(3) +
                        "\t40.8\t-73.8\tTue\t2012\tApr\t10\t09:00:00";
    std::string unknown_cat =
        "u1\tp3\tno_such_cat\tMystery\t40.7\t-73.9\tMon\t2012\tApr\t9\t10:00:00";
    std::string bad_coord = with_field(4, "200.0");
    std::string bad_date = with_field(9, "31");

    std::string path = temp_path("dataset");
    {
        std::ofstream out(path);
        out << "U\tP\tPC\tPCN\tLO\tLA\tW\tY\tM\tD\tT\n";
        out << good1 << "\n";
        out << "# comment\n\n";
        out << unknown_cat << "\n";
        out << bad_coord << "\n";
        out << bad_date << "\n";
        out << "short\tline\n";
        out << good2 << "\n";
    }
    Dataset ds = load_dataset(path, h);
    std::remove(path.c_str());

    // The unknown-category line is syntactically fine, so it counts as
    // parsed and then as a semantic skip.
    CHECK(ds.summary.parsed == 3);
    CHECK(ds.summary.skipped_unknown_category == 1);
    CHECK(ds.summary.skipped_bad_coordinate == 1);
    CHECK(ds.summary.skipped_bad_date == 1);
    CHECK(ds.summary.skipped_malformed == 1);
    CHECK(ds.summary.skipped_total() == 4);
    CHECK(ds.summary.checkin_count == 2);
    CHECK(ds.user_count() == 2);
    REQUIRE(ds.by_user.count("u1") == 1);
    CHECK(ds.by_user.at("u1")[0].leaf_label == 0);
    CHECK(ds.by_user.at("u1")[0].root_label == h.root_of_leaf(0));
}

TEST_CASE("a dataset with no usable line is an error") {
    std::string path = temp_path("dataset_empty");
    {
        std::ofstream out(path);
        out << "U\tP\tPC\tPCN\tLO\tLA\tW\tY\tM\tD\tT\n";
        out << "short\tline\n";
    }
    CategoryHierarchy h = default_synthetic_hierarchy();
    CHECK_THROWS_AS(load_dataset(path, h), EmptyDatasetError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_dataset("/tmp/ucvf_no_such_dataset", h), IoError);
}

TEST_CASE("hierarchy construction validates ids and labels") {
    using Rows = std::vector<std::pair<std::string, std::string>>;
    Rows hier = {{"c1", "Food"}, {"c2", "Food"}, {"c3", "Shop"}};
    Rows labels = {{"c1", "Bakery"}, {"c2", "Cafe"}, {"c3", "Mall"}};
    CategoryHierarchy h = CategoryHierarchy::from_lists(hier, labels);
    CHECK(h.root_count() == 2);
    CHECK(h.leaf_count() == 3);
    CHECK(h.root_of_leaf(h.leaf_index("Bakery")) == h.root_index("Food"));
    CHECK(h.leaf_id(h.leaf_index("Mall")) == "c3");
    CHECK(h.has_leaf_id("c2"));
    CHECK(!h.has_leaf_id("c9"));
    CHECK_THROWS_AS(h.leaf_index_by_id("c9"), HierarchyError);
    CHECK_THROWS_AS(h.root_index("Treasure"), HierarchyError);

    Rows dup_id = {{"c1", "Food"}, {"c1", "Shop"}};
    Rows dup_labels = {{"c1", "Bakery"}, {"c1", "Mall"}};
    CHECK_THROWS_AS(CategoryHierarchy::from_lists(dup_id, dup_labels), HierarchyError);
    Rows missing_label = {{"c1", "Food"}, {"c2", "Food"}};
    Rows one_label = {{"c1", "Bakery"}};
    CHECK_THROWS_AS(CategoryHierarchy::from_lists(missing_label, one_label), HierarchyError);
    CHECK_THROWS_AS(CategoryHierarchy::from_lists({}, {}), HierarchyError);
}

TEST_CASE("hierarchy files round-trip") {
    CategoryHierarchy h = default_synthetic_hierarchy();
    std::string hp = temp_path("hier");
    std::string lp = temp_path("labels");
    h.save(hp, lp);
    CategoryHierarchy back = CategoryHierarchy::load(hp, lp);
    std::remove(hp.c_str());
    std::remove(lp.c_str());
    CHECK(back.root_count() == h.root_count());
    CHECK(back.leaf_count() == h.leaf_count());
    for (int l = 0; l < h.leaf_count(); ++l) {
        CHECK(back.leaf_name(l) == h.leaf_name(l));
        CHECK(back.root_of_leaf(l) == h.root_of_leaf(l));
        CHECK(back.leaf_id(l) == h.leaf_id(l));
    }
}

TEST_CASE("the default taxonomy has the canonical 9x65 shape") {
    CategoryHierarchy h = default_synthetic_hierarchy();
    CHECK(h.root_count() == 9);
    CHECK(h.leaf_count() == 65);
}

TEST_CASE("generated cohorts have the promised size and truth rows") {
    SynthSpec spec;
    spec.groups = {{0, 30, 0.1}, {1, 30, 0.1}, {2, 20, 0.1}, {3, 20, 0.1}};
    spec.months = 4;
    spec.checkins_per_month = 20;
    spec.anchors_per_month = 2;
    spec.seed = 5;
    SynthData data = generate_synthetic(spec);
    CHECK(data.checkins.size() == 100u * (20 + 2) * 4);
    REQUIRE(data.truth.size() == 100);
    std::map<int, int> group_sizes;
    std::set<std::string> users;
    for (const auto& t : data.truth) {
        group_sizes[t.pair_index]++;
        users.insert(t.user_id);
    }
    CHECK(users.size() == 100);
    CHECK(group_sizes[0] == 30);
    CHECK(group_sizes[1] == 30);
    CHECK(group_sizes[2] == 20);
    CHECK(group_sizes[3] == 20);

    SynthData again = generate_synthetic(spec);
    CHECK(again.checkins.size() == data.checkins.size());
    CHECK(serialize_checkin(again.checkins[0]) == serialize_checkin(data.checkins[0]));
    CHECK(serialize_checkin(again.checkins.back()) ==
          serialize_checkin(data.checkins.back()));
}

TEST_CASE("a noise-free time-planted user is exactly stable in both time pairs") {
    SynthSpec spec;
    spec.groups = {{1, 1, 0.0}};  // one time_leaf user, zero noise
    spec.months = 5;
    spec.checkins_per_month = 40;
    spec.anchors_per_month = 3;
    spec.noise_spread = 0.0;
    spec.seed = 8;
    SynthData data = generate_synthetic(spec);
    auto diffs = pair_differences(data, data.truth[0].user_id);
    CHECK(diffs[0] == 0.0);  // time_root is a projection of time_leaf
    CHECK(diffs[1] == 0.0);
    CHECK(diffs[2] > 0.0);
    CHECK(diffs[3] > 0.0);
}

TEST_CASE("a noise-free root-planted user rotates leaves inside the scheduled root") {
    SynthSpec spec;
    spec.groups = {{0, 1, 0.0}};  // one time_root user
    spec.months = 5;
    spec.checkins_per_month = 40;
    spec.anchors_per_month = 3;
    spec.noise_spread = 0.0;
    spec.seed = 9;
    SynthData data = generate_synthetic(spec);
    auto diffs = pair_differences(data, data.truth[0].user_id);
    CHECK(diffs[0] == 0.0);
    CHECK(diffs[1] > 0.0);  // leaf realization shifts with the month
    CHECK(diffs[2] > 0.0);
    CHECK(diffs[3] > 0.0);
}

TEST_CASE("full noise erases the planted structure") {
    SynthSpec spec;
    spec.groups = {{0, 1, 1.0}};
    spec.months = 5;
    spec.checkins_per_month = 40;
    spec.anchors_per_month = 0;
    spec.noise_spread = 0.0;
    spec.seed = 10;
    SynthData data = generate_synthetic(spec);
    auto diffs = pair_differences(data, data.truth[0].user_id);
    for (double d : diffs) CHECK(d > 0.0);
    CHECK(data.truth[0].noise == 1.0);
}

TEST_CASE("shared schedules equalize matrices inside a group, homes stay individual") {
    SynthSpec spec;
    spec.groups = {{0, 3, 0.0}};  // three noise-free time_root users
    spec.months = 4;
    spec.checkins_per_month = 25;
    spec.anchors_per_month = 2;
    spec.noise_spread = 0.0;
    spec.shared_schedule = true;
    spec.seed = 12;
    SynthData data = generate_synthetic(spec);
    const CategoryHierarchy& h = data.hierarchy;
    auto pairs = canonical_pairs(h);

    std::map<std::string, std::vector<Record>> by_user;
    std::map<std::string, std::vector<CheckIn>> raw;
    for (const auto& c : data.checkins) {
        Record r;
        r.checkin = c;
        r.leaf_label = h.leaf_index_by_id(c.category_id);
        r.root_label = h.root_of_leaf(r.leaf_label);
        by_user[c.user_id].push_back(std::move(r));
        raw[c.user_id].push_back(c);
    }
    REQUIRE(by_user.size() == 3);

    std::vector<FeatureMatrix> time_root_mats;
    std::vector<HomeLocation> homes;
    for (const auto& [user, records] : by_user) {
        homes.push_back(estimate_home(user, raw[user]));
        time_root_mats.push_back(build_ucvf(user, records, pairs[0], homes.back()));
    }
    // Same slots, same schedule, zero noise: identical hour-by-root counts.
    CHECK(time_root_mats[0].values == time_root_mats[1].values);
    CHECK(time_root_mats[1].values == time_root_mats[2].values);
    // Homes are still drawn per user.
    CHECK(homes[0].latitude != homes[1].latitude);
    CHECK(homes[1].latitude != homes[2].latitude);

    // Without sharing, the same spec diverges across users.
    spec.shared_schedule = false;
    SynthData solo = generate_synthetic(spec);
    std::map<std::string, std::vector<Record>> solo_by_user;
    std::map<std::string, std::vector<CheckIn>> solo_raw;
    for (const auto& c : solo.checkins) {
        Record r;
        r.checkin = c;
        r.leaf_label = h.leaf_index_by_id(c.category_id);
        r.root_label = h.root_of_leaf(r.leaf_label);
        solo_by_user[c.user_id].push_back(std::move(r));
        solo_raw[c.user_id].push_back(c);
    }
    std::vector<FeatureMatrix> solo_mats;
    for (const auto& [user, records] : solo_by_user) {
        HomeLocation home = estimate_home(user, solo_raw[user]);
        solo_mats.push_back(build_ucvf(user, records, pairs[0], home));
    }
    CHECK(solo_mats[0].values != solo_mats[1].values);
}

TEST_CASE("spec validation rejects nonsense") {
    SynthSpec spec;
    CHECK_THROWS_AS(spec.validate(), InvalidSpecError);  // no groups
    spec.groups = {{5, 10, 0.1}};
    CHECK_THROWS_AS(spec.validate(), InvalidSpecError);  // bad pair index
    spec.groups = {{0, 10, 1.5}};
    CHECK_THROWS_AS(spec.validate(), InvalidSpecError);  // noise out of range
    spec.groups = {{0, 10, 0.1}};
    spec.months = 0;
    CHECK_THROWS_AS(spec.validate(), InvalidSpecError);
}

TEST_CASE("truth files list one row per user") {
    SynthSpec spec;
    spec.groups = {{2, 4, 0.2}};
    spec.months = 3;
    spec.checkins_per_month = 10;
    spec.seed = 3;
    SynthData data = generate_synthetic(spec);
    std::string path = temp_path("truth");
    write_truth_file(data, path);
    std::ifstream in(path);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    std::remove(path.c_str());
    REQUIRE(lines.size() == 5);  // header + 4 users
    CHECK(lines[0] == "user_id,pair,noise");
    CHECK(lines[1].find("distance_root") != std::string::npos);
}
