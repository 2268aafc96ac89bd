#include "ucvf/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ucvf/errors.hpp"
#include "ucvf/report.hpp"

namespace ucvf {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean for " + key + ": " + v);
}

long long parse_int(const std::string& v, const std::string& key) {
    long long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("bad integer for " + key + ": " + v);
    return out;
}

double parse_real(const std::string& v, const std::string& key) {
    char* end = nullptr;
    double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("bad number for " + key + ": " + v);
    return out;
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty element in " + key);
        out.push_back(static_cast<int>(parse_int(item, key)));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr const char* kCanonicalPairIds[4] = {"time_root", "time_leaf", "distance_root",
                                              "distance_leaf"};

std::vector<int> parse_pair_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        int idx = -1;
        for (int i = 0; i < 4; ++i)
            if (item == kCanonicalPairIds[i]) idx = i;
        if (idx < 0) throw ConfigError("bad pair id for " + key + ": " + item);
        out.push_back(idx);
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

}  // namespace

void RunConfig::validate() const {
    if (delta < 0.0) throw ConfigError("delta must be non-negative");
    if (train_fraction <= 0.0 || validation_fraction < 0.0 ||
        train_fraction + validation_fraction >= 1.0)
        throw ConfigError("split fractions must leave room for a test share");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (batch_size < 1) throw ConfigError("batch size must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (k_list.empty()) throw ConfigError("k list is empty");
    for (int k : k_list)
        if (k < 1) throw ConfigError("k values must be >= 1");
    if (synth_users < 1 || synth_months < 1 || synth_checkins_per_month < 1)
        throw ConfigError("synthetic cohort sizes must be positive");
    if (synth_anchors_per_month < 0) throw ConfigError("synth anchors must be >= 0");
    if (!(synth_noise >= 0.0 && synth_noise <= 1.0))
        throw ConfigError("synth noise must lie in [0, 1]");
    if (!(synth_noise_spread >= 0.0 && synth_noise_spread <= 1.0))
        throw ConfigError("synth noise spread must lie in [0, 1]");
    if (synth_pair_indices.empty()) throw ConfigError("synth pair list is empty");
    for (std::size_t i = 0; i < synth_pair_indices.size(); ++i) {
        const int p = synth_pair_indices[i];
        if (p < 0 || p > 3) throw ConfigError("synth pair index out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (synth_pair_indices[j] == p) throw ConfigError("duplicate synth pair");
    }
}

void apply_config_entry(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "dataset") cfg.dataset_path = value;
    else if (key == "hierarchy") cfg.hierarchy_path = value;
    else if (key == "labels") cfg.labels_path = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
    else if (key == "delta") cfg.delta = parse_real(value, key);
    else if (key == "normalize_monthly") cfg.normalize_monthly = parse_bool(value, key);
    else if (key == "enforce_selection") cfg.enforce_selection = parse_bool(value, key);
    else if (key == "time_unit") {
        if (value == "month") cfg.time_unit = TimeUnit::Month;
        else if (value == "week") cfg.time_unit = TimeUnit::Week;
        else throw ConfigError("time_unit must be month or week, got " + value);
    } else if (key == "target_view") {
        if (value == "root") cfg.target_view = ViewKind::Root;
        else if (value == "leaf") cfg.target_view = ViewKind::Leaf;
        else throw ConfigError("target_view must be root or leaf, got " + value);
    } else if (key == "k_list") cfg.k_list = parse_int_list(value, key);
    else if (key == "rq1_absolute_buckets") cfg.rq1_absolute_buckets = parse_bool(value, key);
    else if (key == "train_fraction") cfg.train_fraction = parse_real(value, key);
    else if (key == "validation_fraction") cfg.validation_fraction = parse_real(value, key);
    else if (key == "epochs") cfg.epochs = static_cast<int>(parse_int(value, key));
    else if (key == "learning_rate") cfg.learning_rate = parse_real(value, key);
    else if (key == "batch_size") cfg.batch_size = static_cast<int>(parse_int(value, key));
    else if (key == "applicability_mode") {
        if (value == "indicator") cfg.applicability_mode = ApplicabilityMode::Indicator;
        else if (value == "mask") cfg.applicability_mode = ApplicabilityMode::Mask;
        else throw ConfigError("applicability_mode must be indicator or mask, got " + value);
    } else if (key == "synth_users") cfg.synth_users = static_cast<int>(parse_int(value, key));
    else if (key == "synth_months") cfg.synth_months = static_cast<int>(parse_int(value, key));
    else if (key == "synth_noise") cfg.synth_noise = parse_real(value, key);
    else if (key == "synth_checkins_per_month")
        cfg.synth_checkins_per_month = static_cast<int>(parse_int(value, key));
    else if (key == "synth_anchors_per_month")
        cfg.synth_anchors_per_month = static_cast<int>(parse_int(value, key));
    else if (key == "synth_noise_spread") cfg.synth_noise_spread = parse_real(value, key);
    else if (key == "synth_shared_schedule") cfg.synth_shared_schedule = parse_bool(value, key);
    else if (key == "synth_pairs") cfg.synth_pair_indices = parse_pair_list(value, key);
    else throw ConfigError("unknown config key: " + key);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string content = trim(line);
        if (content.empty() || content[0] == '#') continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + " of " + path +
                              " is not key=value: " + content);
        apply_config_entry(cfg, content.substr(0, eq), content.substr(eq + 1));
    }
    return cfg;
}

std::string canonical_config(const RunConfig& cfg) {
    std::vector<std::string> lines;
    auto add = [&lines](const std::string& k, const std::string& v) {
        lines.push_back(k + "=" + v);
    };
    add("applicability_mode",
        cfg.applicability_mode == ApplicabilityMode::Indicator ? "indicator" : "mask");
    add("batch_size", std::to_string(cfg.batch_size));
    add("dataset", cfg.dataset_path);
    add("delta", format_real(cfg.delta));
    add("enforce_selection", cfg.enforce_selection ? "true" : "false");
    add("epochs", std::to_string(cfg.epochs));
    add("hierarchy", cfg.hierarchy_path);
    {
        std::string ks;
        for (std::size_t i = 0; i < cfg.k_list.size(); ++i) {
            if (i) ks += ',';
            ks += std::to_string(cfg.k_list[i]);
        }
        add("k_list", ks);
    }
    add("labels", cfg.labels_path);
    add("learning_rate", format_real(cfg.learning_rate));
    add("normalize_monthly", cfg.normalize_monthly ? "true" : "false");
    add("out_dir", cfg.out_dir);
    add("rq1_absolute_buckets", cfg.rq1_absolute_buckets ? "true" : "false");
    add("seed", std::to_string(cfg.seed));
    add("synth_anchors_per_month", std::to_string(cfg.synth_anchors_per_month));
    add("synth_checkins_per_month", std::to_string(cfg.synth_checkins_per_month));
    add("synth_months", std::to_string(cfg.synth_months));
    add("synth_noise", format_real(cfg.synth_noise));
    add("synth_noise_spread", format_real(cfg.synth_noise_spread));
    {
        std::string ps;
        for (std::size_t i = 0; i < cfg.synth_pair_indices.size(); ++i) {
            if (i) ps += ',';
            ps += kCanonicalPairIds[cfg.synth_pair_indices[i]];
        }
        add("synth_pairs", ps);
    }
    add("synth_shared_schedule", cfg.synth_shared_schedule ? "true" : "false");
    add("synth_users", std::to_string(cfg.synth_users));
    add("target_view", cfg.target_view == ViewKind::Root ? "root" : "leaf");
    add("time_unit", cfg.time_unit == TimeUnit::Month ? "month" : "week");
    add("train_fraction", format_real(cfg.train_fraction));
    add("validation_fraction", format_real(cfg.validation_fraction));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string config_hash_hex(const RunConfig& cfg) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a_bytes(canonical_config(cfg))));
    return buf;
}

}  // namespace ucvf
