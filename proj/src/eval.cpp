#include "ucvf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ucvf/errors.hpp"
#include "ucvf/hierarchy.hpp"

namespace ucvf {

void SplitSpec::validate() const {
    if (train < 0.0 || validation < 0.0 || test < 0.0)
        throw InvalidConfigError("split fractions must be nonnegative");
    if (std::fabs(train + validation + test - 1.0) > 1e-9)
        throw InvalidConfigError("split fractions must sum to 1");
}

SplitResult split_dataset(const Dataset& ds, const SplitSpec& spec) {
    spec.validate();
    SplitResult out;
    auto add = [](Dataset& d, const std::string& user, std::vector<Record> recs) {
        if (recs.empty()) return;
        d.summary.checkin_count += recs.size();
        d.by_user.emplace(user, std::move(recs));
    };
    for (const auto& [user, recs] : ds.by_user) {
        std::vector<Record> sorted = recs;
        std::stable_sort(sorted.begin(), sorted.end(), [](const Record& a, const Record& b) {
            return a.checkin.time.epoch_seconds() < b.checkin.time.epoch_seconds();
        });
        std::size_t n = sorted.size();
        auto cut = [n](double f) {
            return static_cast<std::size_t>(std::floor(f * static_cast<double>(n)));
        };
        std::size_t c1 = cut(spec.train);
        std::size_t c2 = cut(spec.train + spec.validation);
        if (c1 == 0) {
            out.degenerate_users.push_back(user);
            c1 = n;
            c2 = n;
        }
        add(out.train, user, {sorted.begin(), sorted.begin() + static_cast<long>(c1)});
        add(out.validation, user,
            {sorted.begin() + static_cast<long>(c1), sorted.begin() + static_cast<long>(c2)});
        add(out.test, user, {sorted.begin() + static_cast<long>(c2), sorted.end()});
    }
    for (Dataset* d : {&out.train, &out.validation, &out.test})
        d->summary.user_count = d->by_user.size();
    return out;
}

double accuracy_at_k(const std::vector<std::vector<int>>& predictions,
                     const std::vector<int>& truths, int k) {
    if (predictions.size() != truths.size())
        throw LengthMismatchError("prediction and truth counts differ: " +
                                  std::to_string(predictions.size()) + " vs " +
                                  std::to_string(truths.size()));
    if (k < 1) throw LengthMismatchError("k must be >= 1");
    if (predictions.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto& list = predictions[i];
        if (static_cast<int>(list.size()) < k)
            throw LengthMismatchError("prediction list " + std::to_string(i) + " has " +
                                      std::to_string(list.size()) + " entries, need " +
                                      std::to_string(k));
        for (int j = 0; j < k; ++j)
            if (list[static_cast<std::size_t>(j)] == truths[i]) {
                ++hits;
                break;
            }
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

namespace {

// Ranks label indices by descending key tuples, ascending index last.
template <typename Key>
std::vector<int> rank_by_keys(int label_count, const Key& key) {
    std::vector<int> idx(static_cast<std::size_t>(label_count));
    for (int i = 0; i < label_count; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        auto ka = key(a), kb = key(b);
        if (ka != kb) return ka > kb;
        return a < b;
    });
    return idx;
}

}  // namespace

FrequencyBaseline::FrequencyBaseline(const Dataset& train,
                                     const std::map<std::string, HomeLocation>& homes,
                                     ViewKind view, const CategoryHierarchy& h) {
    labels_ = view == ViewKind::Leaf ? h.leaf_count() : h.root_count();
    global_.assign(static_cast<std::size_t>(labels_), 0);
    for (const auto& [user, recs] : train.by_user) {
        auto hit = homes.find(user);
        if (hit == homes.end()) throw MissingHomeError("no home location for user " + user);
        auto& cells = cell_[user];
        auto& marg = marginal_[user];
        cells.assign(static_cast<std::size_t>(time_buckets_) * distance_buckets_ * labels_, 0);
        marg.assign(static_cast<std::size_t>(labels_), 0);
        for (const auto& r : recs) {
            int t = bucketize_time(r.checkin.time);
            int d = context_value(r.checkin, ContextKind::Distance, hit->second);
            int label = view == ViewKind::Leaf ? r.leaf_label : r.root_label;
            ++cells[(static_cast<std::size_t>(t) * distance_buckets_ + d) * labels_ + label];
            ++marg[static_cast<std::size_t>(label)];
            ++global_[static_cast<std::size_t>(label)];
        }
    }
}

std::vector<int> FrequencyBaseline::rank_labels(const std::string& user_id, int time_bucket,
                                                int distance_bucket) const {
    static const std::vector<std::int64_t> kNoCounts;
    auto cit = cell_.find(user_id);
    auto mit = marginal_.find(user_id);
    const std::vector<std::int64_t>& cells = cit == cell_.end() ? kNoCounts : cit->second;
    const std::vector<std::int64_t>& marg = mit == marginal_.end() ? kNoCounts : mit->second;
    std::size_t base =
        (static_cast<std::size_t>(time_bucket) * distance_buckets_ + distance_bucket) *
        static_cast<std::size_t>(labels_);
    return rank_by_keys(labels_, [&](int l) {
        std::int64_t c = cells.empty() ? 0 : cells[base + static_cast<std::size_t>(l)];
        std::int64_t m = marg.empty() ? 0 : marg[static_cast<std::size_t>(l)];
        return std::make_tuple(c, m, global_[static_cast<std::size_t>(l)]);
    });
}

PairPredictor::PairPredictor(const Dataset& train,
                             const std::map<std::string, HomeLocation>& homes,
                             const PairSpec& pair, const CategoryHierarchy& h)
    : pair_(pair) {
    (void)h;
    global_.assign(static_cast<std::size_t>(pair_.view.label_count), 0.0);
    for (const auto& [user, recs] : train.by_user) {
        auto hit = homes.find(user);
        if (hit == homes.end()) throw MissingHomeError("no home location for user " + user);
        FeatureMatrix m = build_ucvf(user, recs, pair_, hit->second);
        auto& marg = marginal_[user];
        marg.assign(static_cast<std::size_t>(m.cols), 0.0);
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c) {
                marg[static_cast<std::size_t>(c)] += m.at(r, c);
                global_[static_cast<std::size_t>(c)] += m.at(r, c);
            }
        matrices_.emplace(user, std::move(m));
    }
}

std::vector<int> PairPredictor::rank_labels(const std::string& user_id, int time_bucket,
                                            int distance_bucket) const {
    int bucket = pair_.context.kind == ContextKind::Time ? time_bucket : distance_bucket;
    auto mit = matrices_.find(user_id);
    auto git = marginal_.find(user_id);
    const FeatureMatrix* m = mit == matrices_.end() ? nullptr : &mit->second;
    const std::vector<double>* marg = git == marginal_.end() ? nullptr : &git->second;
    return rank_by_keys(pair_.view.label_count, [&](int l) {
        double row = m ? m->at(bucket, l) : 0.0;
        double mg = marg ? (*marg)[static_cast<std::size_t>(l)] : 0.0;
        return std::make_tuple(row, mg, global_[static_cast<std::size_t>(l)]);
    });
}

std::vector<ContextQuery> make_context_queries(const Dataset& test,
                                               const std::map<std::string, HomeLocation>& homes) {
    std::vector<ContextQuery> out;
    for (const auto& [user, recs] : test.by_user) {
        auto hit = homes.find(user);
        if (hit == homes.end()) throw MissingHomeError("no home location for user " + user);
        for (const auto& r : recs) {
            ContextQuery q;
            q.user_id = user;
            q.time_bucket = bucketize_time(r.checkin.time);
            q.distance_bucket = context_value(r.checkin, ContextKind::Distance, hit->second);
            q.root_label = r.root_label;
            q.leaf_label = r.leaf_label;
            out.push_back(std::move(q));
        }
    }
    return out;
}

namespace {

int query_truth(const ContextQuery& q, ViewKind view) {
    return view == ViewKind::Leaf ? q.leaf_label : q.root_label;
}

bool top1_hit(const PairPredictor& pred, const ContextQuery& q) {
    auto ranked = pred.rank_labels(q.user_id, q.time_bucket, q.distance_bucket);
    return ranked.front() == query_truth(q, pred.view());
}

}  // namespace

Rq1Result run_rq1(const ApplicabilityResult& assignments, const Dataset& test,
                  const std::map<std::string, HomeLocation>& homes,
                  const std::vector<PairPredictor>& predictors, bool absolute_buckets) {
    constexpr int kBuckets = 10;
    std::size_t n_pairs = predictors.size();

    // Queries grouped per user, restricted to users with an assignment row.
    std::map<std::string, std::vector<ContextQuery>> queries;
    for (auto& q : make_context_queries(test, homes)) queries[q.user_id].push_back(std::move(q));

    Rq1Result result;
    result.rows.resize(kBuckets);
    for (int b = 0; b < kBuckets; ++b) {
        result.rows[static_cast<std::size_t>(b)].bucket = b + 1;
        result.rows[static_cast<std::size_t>(b)].user_count.assign(n_pairs, 0);
        result.rows[static_cast<std::size_t>(b)].query_count.assign(n_pairs, 0);
        result.rows[static_cast<std::size_t>(b)].accuracy.assign(n_pairs, std::nullopt);
    }

    for (std::size_t p = 0; p < n_pairs; ++p) {
        // Bucket users by this pair's difference value.
        std::vector<std::pair<double, const ApplicabilityAssignment*>> order;
        order.reserve(assignments.assignments.size());
        for (const auto& a : assignments.assignments) order.emplace_back(a.diff[p], &a);
        std::sort(order.begin(), order.end(),
                  [](const auto& x, const auto& y) {
                      if (x.first != y.first) return x.first < y.first;
                      return x.second->user_id < y.second->user_id;
                  });
        std::vector<std::size_t> hits(kBuckets, 0), total(kBuckets, 0);
        for (std::size_t i = 0; i < order.size(); ++i) {
            int b;
            if (absolute_buckets) {
                b = std::min(kBuckets - 1, static_cast<int>(order[i].first / 10.0));
            } else {
                b = static_cast<int>(i * kBuckets / order.size());
            }
            auto& row = result.rows[static_cast<std::size_t>(b)];
            ++row.user_count[p];
            auto qit = queries.find(order[i].second->user_id);
            if (qit == queries.end()) continue;
            for (const auto& q : qit->second) {
                ++total[static_cast<std::size_t>(b)];
                ++row.query_count[p];
                if (top1_hit(predictors[p], q)) ++hits[static_cast<std::size_t>(b)];
            }
        }
        std::vector<double> xs, ys;
        for (int b = 0; b < kBuckets; ++b) {
            if (total[static_cast<std::size_t>(b)] == 0) continue;
            double acc = static_cast<double>(hits[static_cast<std::size_t>(b)]) /
                         static_cast<double>(total[static_cast<std::size_t>(b)]);
            result.rows[static_cast<std::size_t>(b)].accuracy[p] = acc;
            xs.push_back(static_cast<double>(b));
            ys.push_back(acc);
        }
        result.spearman.push_back(xs.size() >= 2
                                      ? spearman_rho(xs, ys)
                                      : std::numeric_limits<double>::quiet_NaN());
    }
    return result;
}

Rq2Result run_rq2(const ApplicabilityResult& assignments, const Dataset& test,
                  const std::map<std::string, HomeLocation>& homes,
                  const std::vector<PairPredictor>& predictors) {
    std::map<std::string, int> assigned;
    for (const auto& a : assignments.assignments) assigned[a.user_id] = a.assigned_pair;

    Rq2Result result;
    result.single_accuracy.assign(predictors.size(), 0.0);
    std::vector<std::size_t> single_hits(predictors.size(), 0);
    std::size_t part_hits = 0;
    for (const auto& q : make_context_queries(test, homes)) {
        auto ait = assigned.find(q.user_id);
        if (ait == assigned.end()) continue;  // user absent from the train split
        ++result.query_count;
        for (std::size_t p = 0; p < predictors.size(); ++p)
            if (top1_hit(predictors[p], q)) ++single_hits[p];
        if (top1_hit(predictors[static_cast<std::size_t>(ait->second)], q)) ++part_hits;
    }
    if (result.query_count > 0) {
        for (std::size_t p = 0; p < predictors.size(); ++p)
            result.single_accuracy[p] =
                static_cast<double>(single_hits[p]) / static_cast<double>(result.query_count);
        result.partitioned_accuracy =
            static_cast<double>(part_hits) / static_cast<double>(result.query_count);
    }
    return result;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw LengthMismatchError("spearman inputs differ in length");
    std::size_t n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> rx = average_ranks(x), ry = average_ranks(y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

std::map<std::string, std::vector<FeatureMatrix>> build_channel_map(
    const Dataset& train, const std::map<std::string, HomeLocation>& homes,
    const std::vector<PairSpec>& pairs) {
    std::map<std::string, std::vector<FeatureMatrix>> out;
    for (const auto& [user, recs] : train.by_user) {
        auto hit = homes.find(user);
        if (hit == homes.end()) throw MissingHomeError("no home location for user " + user);
        std::vector<FeatureMatrix> mats = build_ufs_for_user(user, recs, pairs, hit->second);
        for (auto& m : mats) m = normalize_matrix(m);
        out.emplace(user, std::move(mats));
    }
    return out;
}

std::vector<TrainingExample> build_examples(
    const Dataset& slice, const std::map<std::string, HomeLocation>& homes,
    const std::map<std::string, std::vector<FeatureMatrix>>& channels,
    const ApplicabilityResult& assignments, ViewKind target_view) {
    std::map<std::string, int> assigned;
    for (const auto& a : assignments.assignments) assigned[a.user_id] = a.assigned_pair;

    std::vector<TrainingExample> out;
    for (const auto& [user, recs] : slice.by_user) {
        auto cit = channels.find(user);
        auto ait = assigned.find(user);
        if (cit == channels.end() || ait == assigned.end()) continue;
        auto hit = homes.find(user);
        if (hit == homes.end()) throw MissingHomeError("no home location for user " + user);
        for (const auto& r : recs) {
            TrainingExample ex;
            ex.user_id = user;
            ex.channels = &cit->second;
            ex.indicator = ait->second;
            ex.time_bucket = bucketize_time(r.checkin.time);
            ex.distance_bucket = context_value(r.checkin, ContextKind::Distance, hit->second);
            ex.target = target_view == ViewKind::Leaf ? r.leaf_label : r.root_label;
            out.push_back(std::move(ex));
        }
    }
    return out;
}

ModelConfig default_model_config(const std::vector<PairSpec>& pairs, ViewKind target_view,
                                 const CategoryHierarchy& h) {
    ModelConfig c;
    for (const auto& p : pairs)
        c.channels.push_back({p.context.bucket_count, p.view.label_count});
    c.num_classes = target_view == ViewKind::Leaf ? h.leaf_count() : h.root_count();
    return c;
}

TopkSummary evaluate_topk(const UnifiedModelParams& params,
                          const std::vector<TrainingExample>& test_examples,
                          const FrequencyBaseline& baseline, const std::vector<int>& ks) {
    TopkSummary out;
    out.ks = ks;
    int kmax = 1;
    for (int k : ks) kmax = std::max(kmax, k);
    kmax = std::min(kmax, params.config.num_classes);

    std::vector<std::vector<int>> model_preds, base_preds;
    std::vector<int> truths;
    model_preds.reserve(test_examples.size());
    base_preds.reserve(test_examples.size());
    truths.reserve(test_examples.size());
    for (const auto& ex : test_examples) {
        model_preds.push_back(predict_topk(params, ex, kmax));
        base_preds.push_back(
            baseline.rank_labels(ex.user_id, ex.time_bucket, ex.distance_bucket));
        truths.push_back(ex.target);
    }
    for (int k : ks) {
        int kk = std::min(k, params.config.num_classes);
        out.model_accuracy.push_back(accuracy_at_k(model_preds, truths, kk));
        out.baseline_accuracy.push_back(accuracy_at_k(base_preds, truths, kk));
    }
    return out;
}

}  // namespace ucvf
