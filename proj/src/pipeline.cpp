#include "ucvf/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "ucvf/dataset.hpp"
#include "ucvf/entropy.hpp"
#include "ucvf/errors.hpp"
#include "ucvf/eval.hpp"
#include "ucvf/features.hpp"
#include "ucvf/hierarchy.hpp"
#include "ucvf/model.hpp"
#include "ucvf/report.hpp"
#include "ucvf/synth.hpp"

namespace ucvf {
namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
}

void require_artifact(const RunConfig& cfg, const std::string& name, const std::string& producer) {
    if (!std::filesystem::exists(artifact_path(cfg, name)))
        throw MissingArtifactError("missing artifact " + name + "; run the " + producer +
                                   " stage first");
}

void require_input_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError("no " + what + " path configured");
    if (!std::filesystem::exists(path)) throw ConfigError(what + " path does not exist: " + path);
}

struct SourceData {
    Dataset ds;
    CategoryHierarchy h;
};

SourceData load_source(const RunConfig& cfg) {
    require_input_file(cfg.dataset_path, "dataset");
    require_input_file(cfg.hierarchy_path, "hierarchy");
    require_input_file(cfg.labels_path, "labels");
    SourceData s;
    s.h = CategoryHierarchy::load(cfg.hierarchy_path, cfg.labels_path);
    s.ds = load_dataset(cfg.dataset_path, s.h);
    return s;
}

SplitSpec split_spec(const RunConfig& cfg) {
    SplitSpec spec;
    spec.train = cfg.train_fraction;
    spec.validation = cfg.validation_fraction;
    spec.test = 1.0 - cfg.train_fraction - cfg.validation_fraction;
    return spec;
}

nlohmann::json config_as_json(const RunConfig& cfg) {
    nlohmann::json conf = nlohmann::json::object();
    std::istringstream lines(canonical_config(cfg));
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) conf[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return conf;
}

// Manifest: stage name, seed, effective config and its hash, input and
// output file hashes. No timestamps, so reruns are byte-identical.
void write_manifest(const RunConfig& cfg, const std::string& stage,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["stage"] = stage;
    j["version"] = kVersion;
    j["seed"] = cfg.seed;
    j["config_hash"] = config_hash_hex(cfg);
    j["config"] = config_as_json(cfg);
    nlohmann::json ins = nlohmann::json::object();
    for (const auto& [name, path] : inputs)
        ins[name] = nlohmann::json{{"path", path}, {"hash", file_hash_hex(path)}};
    j["inputs"] = std::move(ins);
    nlohmann::json outs = nlohmann::json::object();
    for (const auto& name : outputs) outs[name] = file_hash_hex(artifact_path(cfg, name));
    j["outputs"] = std::move(outs);
    std::ofstream out(artifact_path(cfg, stage + "_manifest.json"));
    if (!out) throw IoError("cannot write " + stage + " manifest");
    out << j.dump(2) << '\n';
}

// Canonical column slot of a pair: context-major, view-minor.
int canonical_index(const PairSpec& p) {
    return (p.context.kind == ContextKind::Time ? 0 : 2) +
           (p.view.kind == ViewKind::Root ? 0 : 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

double parse_double_field(const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ParseError("expected a number, got '" + s + "'", line_no, -1);
    return v;
}

long long parse_int_field(const std::string& s, std::size_t line_no) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + s + "'", line_no, -1);
    }
    if (pos != s.size()) throw ParseError("expected an integer, got '" + s + "'", line_no, -1);
    return v;
}

// Channel matrices for every train-split user, read back from the features
// artifacts and L1-normalized, in active pair order.
std::map<std::string, std::vector<FeatureMatrix>> load_channels(
    const RunConfig& cfg, const std::vector<PairSpec>& pairs) {
    std::map<std::string, std::vector<FeatureMatrix>> channels;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const std::string name = "ucvf_" + pairs[k].id() + "_train.csv";
        for (auto& m : read_matrix_file(artifact_path(cfg, name))) {
            auto& vec = channels[m.user_id];
            if (vec.empty()) vec.resize(pairs.size());
            vec[k] = normalize_matrix(m);
        }
    }
    for (const auto& [user, vec] : channels)
        for (std::size_t k = 0; k < vec.size(); ++k)
            if (vec[k].rows == 0)
                throw MissingArtifactError("feature artifacts disagree: user " + user +
                                           " has no " + pairs[k].id() + " matrix");
    return channels;
}

std::size_t record_count(const Dataset& d) {
    std::size_t n = 0;
    for (const auto& [user, recs] : d.by_user) n += recs.size();
    return n;
}

}  // namespace

std::string artifact_path(const RunConfig& cfg, const std::string& name) {
    return cfg.out_dir + "/" + name;
}

void write_homes_csv(const std::string& path, const HomeMap& homes) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "user_id,latitude,longitude,support\n";
    for (const auto& [user, home] : homes)
        out << user << ',' << fmt17(home.latitude) << ',' << fmt17(home.longitude) << ','
            << home.support_count << '\n';
    if (!out) throw IoError("failed while writing " + path);
}

HomeMap read_homes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    HomeMap homes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line_no == 1) continue;
        auto f = split_csv_line(line);
        if (f.size() != 4) throw ParseError("home row needs 4 fields", line_no, -1);
        HomeLocation h;
        h.user_id = f[0];
        h.latitude = parse_double_field(f[1], line_no);
        h.longitude = parse_double_field(f[2], line_no);
        h.support_count = static_cast<int>(parse_int_field(f[3], line_no));
        homes.emplace(h.user_id, std::move(h));
    }
    return homes;
}

void write_assignments_csv(const std::string& path, const ApplicabilityResult& result,
                           const std::vector<PairSpec>& pairs) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "user_id,sum_tr,sum_tc,sum_dr,sum_dc,rank_tr,rank_tc,rank_dr,rank_dc,"
           "assigned_pair,periods\n";
    // Active pairs land in their canonical column slot; the rest stay NA.
    std::vector<int> slot(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) slot[k] = canonical_index(pairs[k]);
    for (const auto& a : result.assignments) {
        std::string sums[kPairCount] = {"NA", "NA", "NA", "NA"};
        std::string ranks[kPairCount] = {"NA", "NA", "NA", "NA"};
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            sums[slot[k]] = fmt17(a.diff[k]);
            ranks[slot[k]] = std::to_string(a.rank[k]);
        }
        out << a.user_id;
        for (const auto& s : sums) out << ',' << s;
        for (const auto& r : ranks) out << ',' << r;
        out << ',' << pairs[static_cast<std::size_t>(a.assigned_pair)].id() << ','
            << a.period_count << '\n';
    }
    if (!out) throw IoError("failed while writing " + path);
}

ApplicabilityResult read_assignments_csv(const std::string& path,
                                         const std::vector<PairSpec>& pairs) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<int> slot(pairs.size());
    std::map<std::string, int> pair_by_id;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        slot[k] = canonical_index(pairs[k]);
        pair_by_id[pairs[k].id()] = static_cast<int>(k);
    }

    ApplicabilityResult result;
    result.pair_counts.assign(pairs.size(), 0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line_no == 1) continue;
        auto f = split_csv_line(line);
        if (f.size() != 11) throw ParseError("assignment row needs 11 fields", line_no, -1);
        ApplicabilityAssignment a;
        a.user_id = f[0];
        a.diff.resize(pairs.size());
        a.rank.resize(pairs.size());
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            a.diff[k] = parse_double_field(f[1 + static_cast<std::size_t>(slot[k])], line_no);
            a.rank[k] = static_cast<int>(
                parse_int_field(f[5 + static_cast<std::size_t>(slot[k])], line_no));
        }
        auto hit = pair_by_id.find(f[9]);
        if (hit == pair_by_id.end())
            throw ParseError("assignment to inactive pair '" + f[9] + "'", line_no, 9);
        a.assigned_pair = hit->second;
        a.period_count = static_cast<int>(parse_int_field(f[10], line_no));
        result.pair_counts[static_cast<std::size_t>(a.assigned_pair)]++;
        if (a.period_count == 1) result.single_period_users++;
        result.assignments.push_back(std::move(a));
    }
    return result;
}

std::vector<PairSpec> active_pairs(const RunConfig& cfg, const CategoryHierarchy& h) {
    std::vector<PairSpec> all = canonical_pairs(h);
    if (!cfg.enforce_selection) return all;
    require_artifact(cfg, "influence.csv", "influence");
    std::ifstream in(artifact_path(cfg, "influence.csv"));
    if (!in) throw IoError("cannot open influence artifact");
    std::vector<PairSpec> selected;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line_no == 1) continue;
        auto f = split_csv_line(line);
        if (f.size() != 6) throw ParseError("influence row needs 6 fields", line_no, -1);
        if (f[5] != "true") continue;
        for (const auto& p : all)
            if (p.context.name == f[0] && p.view.name == f[1]) selected.push_back(p);
    }
    if (selected.empty())
        throw ConfigError("selection is enforced but no pair passed the threshold");
    return selected;
}

void stage_synth(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    SynthSpec spec;
    spec.months = cfg.synth_months;
    spec.checkins_per_month = cfg.synth_checkins_per_month;
    spec.anchors_per_month = cfg.synth_anchors_per_month;
    spec.noise_spread = cfg.synth_noise_spread;
    spec.shared_schedule = cfg.synth_shared_schedule;
    spec.seed = cfg.seed;
    const int group_count = static_cast<int>(cfg.synth_pair_indices.size());
    const int base = cfg.synth_users / group_count;
    const int extra = cfg.synth_users % group_count;
    for (int g = 0; g < group_count; ++g) {
        const std::size_t size = static_cast<std::size_t>(base + (g < extra ? 1 : 0));
        if (size == 0) continue;
        spec.groups.push_back({cfg.synth_pair_indices[g], size, cfg.synth_noise});
    }
    SynthData data = generate_synthetic(spec);
    write_synthetic_dataset(data, artifact_path(cfg, "dataset.tsv"));
    data.hierarchy.save(artifact_path(cfg, "hierarchy.csv"), artifact_path(cfg, "leaf_labels.csv"));
    write_truth_file(data, artifact_path(cfg, "truth.csv"));
    write_manifest(cfg, "synth", {},
                   {"dataset.tsv", "hierarchy.csv", "leaf_labels.csv", "truth.csv"});
}

void stage_ingest(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    SourceData s = load_source(cfg);
    HomeMap homes = compute_homes(s.ds);
    write_homes_csv(artifact_path(cfg, "homes.csv"), homes);

    Table t;
    t.name = "ingest_summary";
    t.columns = {"lines_total",
                 "parsed",
                 "skipped_malformed",
                 "skipped_bad_coordinate",
                 "skipped_bad_date",
                 "skipped_unknown_category",
                 "skipped_total",
                 "user_count",
                 "poi_count",
                 "checkin_count"};
    const IngestSummary& su = s.ds.summary;
    t.add_row({int_cell(static_cast<long long>(su.lines_total)),
               int_cell(static_cast<long long>(su.parsed)),
               int_cell(static_cast<long long>(su.skipped_malformed)),
               int_cell(static_cast<long long>(su.skipped_bad_coordinate)),
               int_cell(static_cast<long long>(su.skipped_bad_date)),
               int_cell(static_cast<long long>(su.skipped_unknown_category)),
               int_cell(static_cast<long long>(su.skipped_total())),
               int_cell(static_cast<long long>(su.user_count)),
               int_cell(static_cast<long long>(su.poi_count)),
               int_cell(static_cast<long long>(su.checkin_count))});
    write_table_csv(t, artifact_path(cfg, "ingest_summary.csv"));

    write_manifest(cfg, "ingest",
                   {{"dataset", cfg.dataset_path},
                    {"hierarchy", cfg.hierarchy_path},
                    {"labels", cfg.labels_path}},
                   {"homes.csv", "ingest_summary.csv"});
}

void stage_influence(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    require_artifact(cfg, "homes.csv", "ingest");
    SourceData s = load_source(cfg);
    HomeMap homes = read_homes_csv(artifact_path(cfg, "homes.csv"));
    auto rows = influence_analysis(s.ds, homes, s.h, cfg.delta);

    std::ofstream out(artifact_path(cfg, "influence.csv"));
    if (!out) throw IoError("cannot write influence artifact");
    out << "context,view,entropy,gain,gain_ratio,selected\n";
    for (const auto& r : rows)
        out << r.context << ',' << r.view << ',' << fmt17(r.entropy) << ',' << fmt17(r.gain)
            << ',' << fmt17(r.gain_ratio) << ',' << (r.selected ? "true" : "false") << '\n';
    out.close();

    write_manifest(cfg, "influence",
                   {{"dataset", cfg.dataset_path}, {"homes", artifact_path(cfg, "homes.csv")}},
                   {"influence.csv"});
}

void stage_features(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    require_artifact(cfg, "homes.csv", "ingest");
    SourceData s = load_source(cfg);
    HomeMap homes = read_homes_csv(artifact_path(cfg, "homes.csv"));
    const auto pairs = active_pairs(cfg, s.h);
    SplitResult split = split_dataset(s.ds, split_spec(cfg));

    std::vector<std::string> outputs;
    const std::pair<const char*, const Dataset*> slices[3] = {
        {"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}};
    for (const auto& pair : pairs) {
        for (const auto& [slice_name, slice] : slices) {
            std::vector<FeatureMatrix> mats;
            for (const auto& [user, recs] : slice->by_user) {
                auto hit = homes.find(user);
                if (hit == homes.end()) throw MissingHomeError("no home for user " + user);
                mats.push_back(build_ucvf(user, recs, pair, hit->second));
            }
            const std::string name = "ucvf_" + pair.id() + "_" + slice_name + ".csv";
            write_matrix_file(artifact_path(cfg, name), mats,
                              "pair=" + pair.id() + " split=" + slice_name);
            outputs.push_back(name);
        }
    }

    Table t;
    t.name = "split_summary";
    t.columns = {"train_users",        "validation_users", "test_users",      "train_records",
                 "validation_records", "test_records",     "degenerate_users"};
    t.add_row({int_cell(static_cast<long long>(split.train.by_user.size())),
               int_cell(static_cast<long long>(split.validation.by_user.size())),
               int_cell(static_cast<long long>(split.test.by_user.size())),
               int_cell(static_cast<long long>(record_count(split.train))),
               int_cell(static_cast<long long>(record_count(split.validation))),
               int_cell(static_cast<long long>(record_count(split.test))),
               int_cell(static_cast<long long>(split.degenerate_users.size()))});
    write_table_csv(t, artifact_path(cfg, "split_summary.csv"));
    outputs.push_back("split_summary.csv");

    std::vector<std::pair<std::string, std::string>> inputs = {
        {"dataset", cfg.dataset_path}, {"homes", artifact_path(cfg, "homes.csv")}};
    if (cfg.enforce_selection)
        inputs.push_back({"influence", artifact_path(cfg, "influence.csv")});
    write_manifest(cfg, "features", inputs, outputs);
}

void stage_applicability(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    require_artifact(cfg, "homes.csv", "ingest");
    SourceData s = load_source(cfg);
    HomeMap homes = read_homes_csv(artifact_path(cfg, "homes.csv"));
    const auto pairs = active_pairs(cfg, s.h);
    SplitResult split = split_dataset(s.ds, split_spec(cfg));

    ApplicabilityResult result =
        compute_applicability(split.train, homes, pairs, cfg.time_unit, cfg.normalize_monthly);
    write_assignments_csv(artifact_path(cfg, "assignments.csv"), result, pairs);

    Table t;
    t.name = "assignment_summary";
    t.columns = {"count_time_root",     "count_time_leaf", "count_distance_root",
                 "count_distance_leaf", "total_users",     "single_period_users"};
    long long counts[kPairCount] = {0, 0, 0, 0};
    long long total = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        counts[canonical_index(pairs[k])] = static_cast<long long>(result.pair_counts[k]);
        total += static_cast<long long>(result.pair_counts[k]);
    }
    t.add_row({int_cell(counts[0]), int_cell(counts[1]), int_cell(counts[2]), int_cell(counts[3]),
               int_cell(total), int_cell(static_cast<long long>(result.single_period_users))});
    write_table_csv(t, artifact_path(cfg, "assignment_summary.csv"));

    std::vector<std::pair<std::string, std::string>> inputs = {
        {"dataset", cfg.dataset_path}, {"homes", artifact_path(cfg, "homes.csv")}};
    if (cfg.enforce_selection)
        inputs.push_back({"influence", artifact_path(cfg, "influence.csv")});
    write_manifest(cfg, "applicability", inputs, {"assignments.csv", "assignment_summary.csv"});
}

void stage_train(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    require_artifact(cfg, "homes.csv", "ingest");
    require_artifact(cfg, "assignments.csv", "applicability");
    SourceData s = load_source(cfg);
    const auto pairs = active_pairs(cfg, s.h);
    for (const auto& p : pairs) require_artifact(cfg, "ucvf_" + p.id() + "_train.csv", "features");

    HomeMap homes = read_homes_csv(artifact_path(cfg, "homes.csv"));
    SplitResult split = split_dataset(s.ds, split_spec(cfg));
    auto channels = load_channels(cfg, pairs);
    ApplicabilityResult assignments =
        read_assignments_csv(artifact_path(cfg, "assignments.csv"), pairs);

    auto train_examples = build_examples(split.train, homes, channels, assignments, cfg.target_view);
    auto val_examples =
        build_examples(split.validation, homes, channels, assignments, cfg.target_view);

    ModelConfig mc = default_model_config(pairs, cfg.target_view, s.h);
    mc.epochs = cfg.epochs;
    mc.learning_rate = cfg.learning_rate;
    mc.batch_size = cfg.batch_size;
    mc.applicability_mode = cfg.applicability_mode;

    TrainOutcome outcome = train(mc, train_examples, val_examples, cfg.seed);
    save_checkpoint(artifact_path(cfg, "checkpoint.txt"), outcome.params);

    std::ofstream log(artifact_path(cfg, "training_log.csv"));
    if (!log) throw IoError("cannot write training log");
    log << "epoch,train_loss,val_loss,val_top1\n";
    for (const auto& e : outcome.log)
        log << e.epoch << ',' << fmt17(e.train_loss) << ','
            << (e.val_loss ? fmt17(*e.val_loss) : "NA") << ','
            << (e.val_top1 ? fmt17(*e.val_top1) : "NA") << '\n';
    log.close();

    std::vector<std::pair<std::string, std::string>> inputs = {
        {"dataset", cfg.dataset_path},
        {"homes", artifact_path(cfg, "homes.csv")},
        {"assignments", artifact_path(cfg, "assignments.csv")}};
    for (const auto& p : pairs)
        inputs.push_back(
            {"ucvf_" + p.id() + "_train", artifact_path(cfg, "ucvf_" + p.id() + "_train.csv")});
    write_manifest(cfg, "train", inputs, {"checkpoint.txt", "training_log.csv"});
}

void stage_evaluate(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    require_artifact(cfg, "homes.csv", "ingest");
    require_artifact(cfg, "assignments.csv", "applicability");
    require_artifact(cfg, "checkpoint.txt", "train");
    SourceData s = load_source(cfg);
    const auto pairs = active_pairs(cfg, s.h);
    for (const auto& p : pairs) require_artifact(cfg, "ucvf_" + p.id() + "_train.csv", "features");

    HomeMap homes = read_homes_csv(artifact_path(cfg, "homes.csv"));
    SplitResult split = split_dataset(s.ds, split_spec(cfg));
    auto channels = load_channels(cfg, pairs);
    ApplicabilityResult assignments =
        read_assignments_csv(artifact_path(cfg, "assignments.csv"), pairs);
    UnifiedModelParams params = load_checkpoint(artifact_path(cfg, "checkpoint.txt"));

    auto test_examples = build_examples(split.test, homes, channels, assignments, cfg.target_view);
    FrequencyBaseline baseline(split.train, homes, cfg.target_view, s.h);
    TopkSummary topk = evaluate_topk(params, test_examples, baseline, cfg.k_list);

    {
        std::ofstream out(artifact_path(cfg, "topk_summary.csv"));
        if (!out) throw IoError("cannot write topk summary");
        out << "k,model_accuracy,baseline_accuracy\n";
        for (std::size_t i = 0; i < topk.ks.size(); ++i)
            out << topk.ks[i] << ',' << fmt17(topk.model_accuracy[i]) << ','
                << fmt17(topk.baseline_accuracy[i]) << '\n';
    }

    std::vector<PairPredictor> predictors;
    predictors.reserve(pairs.size());
    for (const auto& p : pairs) predictors.emplace_back(split.train, homes, p, s.h);

    Rq1Result rq1 = run_rq1(assignments, split.test, homes, predictors, cfg.rq1_absolute_buckets);
    {
        std::ofstream out(artifact_path(cfg, "rq1.csv"));
        if (!out) throw IoError("cannot write rq1 table");
        out << "bucket";
        for (const auto& p : pairs)
            out << ",users_" << p.id() << ",queries_" << p.id() << ",acc_" << p.id();
        out << '\n';
        for (const auto& row : rq1.rows) {
            out << row.bucket;
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                out << ',' << row.user_count[k] << ',' << row.query_count[k] << ',';
                if (row.accuracy[k])
                    out << fmt17(*row.accuracy[k]);
                else
                    out << "NA";
            }
            out << '\n';
        }
    }
    {
        std::ofstream out(artifact_path(cfg, "rq1_trend.csv"));
        if (!out) throw IoError("cannot write rq1 trend table");
        out << "pair,spearman_rho\n";
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            out << pairs[k].id() << ',';
            if (std::isfinite(rq1.spearman[k]))
                out << fmt17(rq1.spearman[k]);
            else
                out << "NA";
            out << '\n';
        }
    }

    Rq2Result rq2 = run_rq2(assignments, split.test, homes, predictors);
    {
        std::ofstream out(artifact_path(cfg, "rq2.csv"));
        if (!out) throw IoError("cannot write rq2 table");
        std::string sing[kPairCount] = {"NA", "NA", "NA", "NA"};
        for (std::size_t k = 0; k < pairs.size(); ++k)
            sing[canonical_index(pairs[k])] = fmt17(rq2.single_accuracy[k]);
        out << "single_time_root,single_time_leaf,single_distance_root,single_distance_leaf,"
               "partitioned,query_count\n";
        out << sing[0] << ',' << sing[1] << ',' << sing[2] << ',' << sing[3] << ','
            << fmt17(rq2.partitioned_accuracy) << ',' << rq2.query_count << '\n';
    }

    std::vector<std::pair<std::string, std::string>> inputs = {
        {"dataset", cfg.dataset_path},
        {"homes", artifact_path(cfg, "homes.csv")},
        {"assignments", artifact_path(cfg, "assignments.csv")},
        {"checkpoint", artifact_path(cfg, "checkpoint.txt")}};
    for (const auto& p : pairs)
        inputs.push_back(
            {"ucvf_" + p.id() + "_train", artifact_path(cfg, "ucvf_" + p.id() + "_train.csv")});
    write_manifest(cfg, "evaluate", inputs,
                   {"topk_summary.csv", "rq1.csv", "rq1_trend.csv", "rq2.csv"});
}

void stage_report(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    const char* required[][2] = {{"ingest_summary.csv", "ingest"},
                                 {"influence.csv", "influence"},
                                 {"split_summary.csv", "features"},
                                 {"assignment_summary.csv", "applicability"},
                                 {"topk_summary.csv", "evaluate"},
                                 {"rq1.csv", "evaluate"},
                                 {"rq1_trend.csv", "evaluate"},
                                 {"rq2.csv", "evaluate"}};
    for (const auto& r : required) require_artifact(cfg, r[0], r[1]);

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir + "/report", ec);
    if (ec) throw IoError("cannot create report directory: " + ec.message());

    std::vector<std::string> outputs;
    for (const auto& r : required) {
        const std::string file = r[0];
        const std::string base = file.substr(0, file.rfind('.'));
        Table t = read_table_csv(artifact_path(cfg, file), base);
        // Human-facing mirrors carry 6 significant digits.
        for (auto& row : t.rows)
            for (auto& cell : row)
                if (std::holds_alternative<double>(cell)) cell = real_cell(std::get<double>(cell));
        write_table_csv(t, artifact_path(cfg, "report/" + base + ".csv"));
        write_table_json(t, artifact_path(cfg, "report/" + base + ".json"));
        outputs.push_back("report/" + base + ".csv");
        outputs.push_back("report/" + base + ".json");
    }

    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.seed;
    manifest["config_hash"] = config_hash_hex(cfg);
    manifest["dataset_hash"] = cfg.dataset_path.empty() ? "" : file_hash_hex(cfg.dataset_path);
    manifest["config"] = config_as_json(cfg);
    {
        std::ofstream out(artifact_path(cfg, "report/run_manifest.json"));
        if (!out) throw IoError("cannot write run manifest");
        out << manifest.dump(2) << '\n';
    }
    outputs.push_back("report/run_manifest.json");

    std::vector<std::pair<std::string, std::string>> inputs;
    for (const auto& r : required) inputs.push_back({r[0], artifact_path(cfg, r[0])});
    write_manifest(cfg, "report", inputs, outputs);
}

}  // namespace ucvf
