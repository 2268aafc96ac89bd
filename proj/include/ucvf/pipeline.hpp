#pragma once

#include <string>
#include <vector>

#include "ucvf/applicability.hpp"
#include "ucvf/config.hpp"
#include "ucvf/geo.hpp"
#include "ucvf/hierarchy.hpp"

namespace ucvf {

// Pipeline stages. Each reads raw inputs named in the config plus the
// artifacts of earlier stages, writes its own artifacts into cfg.out_dir,
// and drops <stage>_manifest.json with input/output hashes, the seed, and
// the effective config. Missing upstream artifacts raise
// MissingArtifactError naming the stage to run first.
void stage_synth(const RunConfig& cfg);
void stage_ingest(const RunConfig& cfg);
void stage_influence(const RunConfig& cfg);
void stage_features(const RunConfig& cfg);
void stage_applicability(const RunConfig& cfg);
void stage_train(const RunConfig& cfg);
void stage_evaluate(const RunConfig& cfg);
void stage_report(const RunConfig& cfg);

// Shared artifact helpers (the acceptance harness reuses them).
std::string artifact_path(const RunConfig& cfg, const std::string& name);
void write_homes_csv(const std::string& path, const HomeMap& homes);
HomeMap read_homes_csv(const std::string& path);
void write_assignments_csv(const std::string& path, const ApplicabilityResult& result,
                           const std::vector<PairSpec>& pairs);
ApplicabilityResult read_assignments_csv(const std::string& path,
                                         const std::vector<PairSpec>& pairs);

// The pair list a run works with: all four canonical pairs, narrowed to the
// influence-selected ones when enforce_selection is set (this reads the
// influence artifact).
std::vector<PairSpec> active_pairs(const RunConfig& cfg, const CategoryHierarchy& h);

}  // namespace ucvf
