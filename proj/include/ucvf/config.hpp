#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucvf/applicability.hpp"
#include "ucvf/model.hpp"
#include "ucvf/specs.hpp"

namespace ucvf {

// Run-wide settings. Loaded from a flat key=value file, then overlaid by
// command-line flags; every stage manifest echoes the effective values.
struct RunConfig {
    std::string dataset_path;
    std::string hierarchy_path;
    std::string labels_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;

    double delta = 0.1;                  // gain-ratio selection threshold
    bool normalize_monthly = false;      // unit-sum monthly matrices
    bool enforce_selection = false;      // keep only influence-selected pairs
    TimeUnit time_unit = TimeUnit::Month;
    ViewKind target_view = ViewKind::Root;
    std::vector<int> k_list = {1, 5, 10};
    bool rq1_absolute_buckets = false;

    double train_fraction = 0.8;
    double validation_fraction = 0.1;

    int epochs = 30;
    double learning_rate = 0.01;
    int batch_size = 32;
    ApplicabilityMode applicability_mode = ApplicabilityMode::Indicator;

    // Synthetic-cohort knobs (only the synth stage reads them).
    int synth_users = 400;
    int synth_months = 6;
    double synth_noise = 0.1;
    int synth_checkins_per_month = 120;
    int synth_anchors_per_month = 6;
    double synth_noise_spread = 0.2;
    bool synth_shared_schedule = false;             // one schedule per group
    std::vector<int> synth_pair_indices = {0, 1, 2, 3};  // groups to generate

    void validate() const;  // ConfigError
};

// Parses a flat key=value file ('#' comments, blank lines allowed).
// Unknown keys and unparseable values raise ConfigError.
RunConfig load_run_config(const std::string& path);

// Applies one key=value pair (the CLI override path shares the parser).
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

// Sorted key=value lines covering every field; two configs serialize
// identically iff they are equal, so the hash identifies the run settings.
std::string canonical_config(const RunConfig& cfg);
std::string config_hash_hex(const RunConfig& cfg);

}  // namespace ucvf
