#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ucvf/config.hpp"
#include "ucvf/errors.hpp"
#include "ucvf/report.hpp"

using namespace ucvf;

namespace {

std::string temp_path(const char* name) {
    return std::string("/tmp/ucvf_test_") + name + "_" + std::to_string(getpid());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Table sample_table() {
    Table t;
    t.name = "sample";
    t.columns = {"id", "label", "count", "score", "note"};
    t.add_row({int_cell(1), text_cell("alpha"), int_cell(42), real_cell(0.125), na_cell()});
    t.add_row({int_cell(2), text_cell("beta, maybe"), int_cell(-7),
               real_cell(1234567.891), text_cell("quoted \"text\"")});
    t.add_row({int_cell(3), text_cell("gamma"), int_cell(0), real_cell(-0.0001220703125),
               na_cell()});
    return t;
}

}  // namespace

TEST_CASE("config defaults validate and round-trip through the canonical form") {
    RunConfig cfg;
    cfg.validate();
    std::string canon = canonical_config(cfg);

    RunConfig rebuilt;
    std::stringstream ss(canon);
    std::string line;
    while (std::getline(ss, line)) {
        auto eq = line.find('=');
        REQUIRE(eq != std::string::npos);
        apply_config_entry(rebuilt, line.substr(0, eq), line.substr(eq + 1));
    }
    CHECK(canonical_config(rebuilt) == canon);
    CHECK(config_hash_hex(rebuilt) == config_hash_hex(cfg));
}

TEST_CASE("config file parsing handles comments, blanks and overrides") {
    std::string path = temp_path("config");
    {
        std::ofstream out(path);
        out << "# comment line\n\nseed = 99\ndelta=0.25\ntarget_view=leaf\n"
            << "k_list=1,3,7\nsynth_pairs=distance_root,distance_leaf\n"
            << "synth_shared_schedule=yes\n";
    }
    RunConfig cfg = load_run_config(path);
    std::remove(path.c_str());
    CHECK(cfg.seed == 99);
    CHECK(cfg.delta == 0.25);
    CHECK(cfg.target_view == ViewKind::Leaf);
    CHECK(cfg.k_list == std::vector<int>{1, 3, 7});
    CHECK(cfg.synth_pair_indices == std::vector<int>{2, 3});
    CHECK(cfg.synth_shared_schedule);
}

TEST_CASE("config rejects unknown keys and malformed values") {
    RunConfig cfg;
    CHECK_THROWS_AS(apply_config_entry(cfg, "no_such_key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "seed", "abc"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "delta", "fast"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "normalize_monthly", "maybe"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "target_view", "stem"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "k_list", ""), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "synth_pairs", "time_root,bogus"), ConfigError);
}

TEST_CASE("config validation bounds the numeric fields") {
    RunConfig cfg;
    cfg.delta = -0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.train_fraction = 0.95;
    cfg.validation_fraction = 0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.synth_pair_indices = {0, 0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.synth_pair_indices = {4};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("the config hash tracks every field") {
    RunConfig a;
    RunConfig b;
    CHECK(config_hash_hex(a) == config_hash_hex(b));
    b.synth_shared_schedule = true;
    CHECK(config_hash_hex(a) != config_hash_hex(b));
    b = RunConfig{};
    b.synth_pair_indices = {1, 2};
    CHECK(config_hash_hex(a) != config_hash_hex(b));
    b = RunConfig{};
    b.seed = 2;
    CHECK(config_hash_hex(a) != config_hash_hex(b));
}

TEST_CASE("cells format NA, integers and quantized reals") {
    CHECK(format_cell(na_cell()) == "NA");
    CHECK(format_cell(int_cell(-12)) == "-12");
    CHECK(format_cell(text_cell("plain")) == "plain");
    CHECK(format_cell(real_cell(0.125)) == "0.125");
    // %.6g quantization happens when the cell is built.
    CHECK(format_cell(real_cell(1.0 / 3.0)) == "0.333333");
    CHECK(format_cell(real_cell(1234567.891)) == "1.23457e+06");
}

TEST_CASE("numeric equality bridges integer and real cells") {
    CHECK(cells_equal(int_cell(2), real_cell(2.0)));
    CHECK(cells_equal(na_cell(), na_cell()));
    CHECK(!cells_equal(int_cell(2), int_cell(3)));
    CHECK(!cells_equal(na_cell(), int_cell(0)));
    CHECK(cells_equal(text_cell("x"), text_cell("x")));
}

TEST_CASE("csv and json emissions parse back field-for-field equal") {
    Table t = sample_table();
    std::string csv_path = temp_path("table_csv");
    std::string json_path = temp_path("table_json");
    write_table_csv(t, csv_path);
    write_table_json(t, json_path);
    Table from_csv = read_table_csv(csv_path, "sample");
    Table from_json = read_table_json(json_path);
    std::remove(csv_path.c_str());
    std::remove(json_path.c_str());

    CHECK(tables_equal(from_csv, t));
    CHECK(tables_equal(from_json, t));
    CHECK(tables_equal(from_csv, from_json));
}

TEST_CASE("an empty result set becomes a header-only file") {
    Table t;
    t.name = "empty";
    t.columns = {"a", "b"};
    std::string path = temp_path("empty_table");
    write_table_csv(t, path);
    CHECK(slurp(path) == "a,b\n");
    Table back = read_table_csv(path, "empty");
    std::remove(path.c_str());
    CHECK(back.rows.empty());
    CHECK(back.columns == t.columns);
}

TEST_CASE("row width is enforced") {
    Table t;
    t.columns = {"a", "b"};
    CHECK_THROWS_AS(t.add_row({int_cell(1)}), LengthMismatchError);
}

TEST_CASE("fnv-1a matches the published test vectors") {
    CHECK(fnv1a_bytes("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a_bytes("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a_bytes("foobar") == 0x85944171f73967e8ull);

    std::string path = temp_path("hash_file");
    {
        std::ofstream out(path, std::ios::binary);
        out << "foobar";
    }
    CHECK(fnv1a_file(path) == 0x85944171f73967e8ull);
    CHECK(file_hash_hex(path) == "85944171f73967e8");
    std::remove(path.c_str());
    CHECK_THROWS_AS(fnv1a_file("/tmp/ucvf_no_such_file"), IoError);
}
