#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ucvf/applicability.hpp"
#include "ucvf/dataset.hpp"
#include "ucvf/model.hpp"
#include "ucvf/specs.hpp"

namespace ucvf {

class CategoryHierarchy;

struct SplitSpec {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;

    // Fractions must be nonnegative and sum to 1 (1e-9).
    void validate() const;
};

struct SplitResult {
    Dataset train;
    Dataset validation;
    Dataset test;
    // Users whose record count floors the train cut to zero; they keep all
    // records in the train split instead of losing them to the test slice.
    std::vector<std::string> degenerate_users;
};

// Per user: records sorted chronologically (stable, so equal timestamps keep
// input order), cut at floor(train*n) and floor((train+validation)*n). A
// user appears in a split only when they have records there.
SplitResult split_dataset(const Dataset& ds, const SplitSpec& spec);

// One test check-in reduced to its context buckets and true label in a
// single view.
struct EvalQuery {
    std::string user_id;
    int time_bucket = 0;
    int distance_bucket = 0;
    int target = 0;
};

// Fraction of queries whose true label appears among the first k predicted
// labels. Throws LengthMismatchError when predictions and truths disagree in
// length or any list is shorter than k.
double accuracy_at_k(const std::vector<std::vector<int>>& predictions,
                     const std::vector<int>& truths, int k);

// Count-based ranking over (user, time bucket, distance bucket) cells with
// backoff: labels compare by the user's count in the exact cell, then the
// user's marginal count, then the global count, then ascending label index.
// The result is always a full permutation of the label space.
class FrequencyBaseline {
  public:
    FrequencyBaseline(const Dataset& train, const std::map<std::string, HomeLocation>& homes,
                      ViewKind view, const CategoryHierarchy& h);

    std::vector<int> rank_labels(const std::string& user_id, int time_bucket,
                                 int distance_bucket) const;
    int label_count() const { return labels_; }

  private:
    int labels_ = 0;
    int time_buckets_ = kTimeBucketCount;
    int distance_buckets_ = kDistanceBucketCount;
    std::map<std::string, std::vector<std::int64_t>> cell_;      // (t*D+d)*L + label
    std::map<std::string, std::vector<std::int64_t>> marginal_;  // label
    std::vector<std::int64_t> global_;
};

// A single pair's matrix used as a standalone predictor in the pair's own
// view: the user's train matrix row for the query's context bucket ranks the
// labels, with marginal, global, and index backoff as in the baseline.
class PairPredictor {
  public:
    PairPredictor(const Dataset& train, const std::map<std::string, HomeLocation>& homes,
                  const PairSpec& pair, const CategoryHierarchy& h);

    std::vector<int> rank_labels(const std::string& user_id, int time_bucket,
                                 int distance_bucket) const;
    ViewKind view() const { return pair_.view.kind; }
    const PairSpec& pair() const { return pair_; }

  private:
    PairSpec pair_;
    std::map<std::string, FeatureMatrix> matrices_;
    std::map<std::string, std::vector<double>> marginal_;
    std::vector<double> global_;
};

// A test check-in with both view labels, shared by the RQ procedures.
struct ContextQuery {
    std::string user_id;
    int time_bucket = 0;
    int distance_bucket = 0;
    int root_label = 0;
    int leaf_label = 0;
};

std::vector<ContextQuery> make_context_queries(const Dataset& test,
                                               const std::map<std::string, HomeLocation>& homes);

// Accuracy-vs-stability table. Per pair, users are bucketed by that pair's
// difference value (deciles by default, the absolute 10..100 grid when
// absolute_buckets is set) and the pair's own top-1 accuracy is evaluated
// per bucket. Buckets without test queries carry no accuracy.
struct Rq1Row {
    int bucket = 0;  // 1-based
    std::vector<std::size_t> user_count;        // per pair
    std::vector<std::size_t> query_count;       // per pair
    std::vector<std::optional<double>> accuracy;  // per pair
};

struct Rq1Result {
    std::vector<Rq1Row> rows;
    std::vector<double> spearman;  // per pair; NaN when undefined
};

Rq1Result run_rq1(const ApplicabilityResult& assignments, const Dataset& test,
                  const std::map<std::string, HomeLocation>& homes,
                  const std::vector<PairPredictor>& predictors, bool absolute_buckets = false);

// Partitioned-vs-single comparison: each pair scored standalone over every
// query, then the per-user assigned pair scored over the same queries.
struct Rq2Result {
    std::vector<double> single_accuracy;  // per pair
    double partitioned_accuracy = 0.0;
    std::size_t query_count = 0;
};

Rq2Result run_rq2(const ApplicabilityResult& assignments, const Dataset& test,
                  const std::map<std::string, HomeLocation>& homes,
                  const std::vector<PairPredictor>& predictors);

// Spearman rank correlation with average ranks on ties; NaN when either
// side has zero rank variance. Throws LengthMismatchError on unequal sizes.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

// Normalized train-split matrices per user, in canonical pair order; the
// channel inputs of every model example point into this map, which must
// outlive them.
std::map<std::string, std::vector<FeatureMatrix>> build_channel_map(
    const Dataset& train, const std::map<std::string, HomeLocation>& homes,
    const std::vector<PairSpec>& pairs);

// Model examples for one dataset slice. Users missing a channel entry or an
// applicability assignment are skipped (only possible for users absent from
// the train split).
std::vector<TrainingExample> build_examples(
    const Dataset& slice, const std::map<std::string, HomeLocation>& homes,
    const std::map<std::string, std::vector<FeatureMatrix>>& channels,
    const ApplicabilityResult& assignments, ViewKind target_view);

// Canonical model configuration for the given pairs and prediction view.
ModelConfig default_model_config(const std::vector<PairSpec>& pairs, ViewKind target_view,
                                 const CategoryHierarchy& h);

// Accuracy@K of the trained model and the frequency baseline over the same
// test examples, for each requested K.
struct TopkSummary {
    std::vector<int> ks;
    std::vector<double> model_accuracy;
    std::vector<double> baseline_accuracy;
};

TopkSummary evaluate_topk(const UnifiedModelParams& params,
                          const std::vector<TrainingExample>& test_examples,
                          const FrequencyBaseline& baseline, const std::vector<int>& ks);

}  // namespace ucvf
