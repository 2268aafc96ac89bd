#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ucvf/errors.hpp"
#include "ucvf/features.hpp"
#include "ucvf/model.hpp"

using namespace ucvf;

namespace {

ModelConfig tiny_config() {
    ModelConfig c;
    c.channels = {{6, 4}, {6, 4}};
    c.filters_per_channel = 2;
    c.hidden_size = 8;
    c.num_classes = 3;
    c.time_buckets = 6;
    c.distance_buckets = 4;
    c.batch_size = 4;
    c.epochs = 3;
    c.learning_rate = 0.05;
    return c;
}

std::vector<FeatureMatrix> random_channels(const ModelConfig& c, std::mt19937_64& rng) {
    std::vector<FeatureMatrix> mats;
    for (const auto& shape : c.channels) {
        FeatureMatrix m;
        m.rows = shape.rows;
        m.cols = shape.cols;
        m.values.resize(static_cast<std::size_t>(shape.rows) * shape.cols);
        double total = 0.0;
        for (auto& v : m.values) {
            v = static_cast<double>(rng() % 1000) / 1000.0;
            total += v;
        }
        for (auto& v : m.values) v /= total;
        mats.push_back(std::move(m));
    }
    return mats;
}

TrainingExample example_for(const std::vector<FeatureMatrix>* channels, const ModelConfig& c,
                            std::mt19937_64& rng) {
    TrainingExample ex;
    ex.user_id = "u1";
    ex.channels = channels;
    ex.indicator = static_cast<int>(rng() % static_cast<unsigned>(c.channel_count()));
    ex.time_bucket = static_cast<int>(rng() % static_cast<unsigned>(c.time_buckets));
    ex.distance_bucket = static_cast<int>(rng() % static_cast<unsigned>(c.distance_buckets));
    ex.target = static_cast<int>(rng() % static_cast<unsigned>(c.num_classes));
    return ex;
}

std::vector<double*> all_weights(UnifiedModelParams& p) {
    std::vector<double*> out;
    for (auto& ch : p.conv_w)
        for (auto& w : ch) out.push_back(&w);
    for (auto& ch : p.conv_b)
        for (auto& w : ch) out.push_back(&w);
    for (auto& w : p.w1) out.push_back(&w);
    for (auto& w : p.b1) out.push_back(&w);
    for (auto& w : p.w2) out.push_back(&w);
    for (auto& w : p.b2) out.push_back(&w);
    return out;
}

}  // namespace

TEST_CASE("initialisation is deterministic in the seed") {
    ModelConfig c = tiny_config();
    UnifiedModelParams a = init_params(c, 5);
    UnifiedModelParams b = init_params(c, 5);
    UnifiedModelParams d = init_params(c, 6);
    CHECK(a.w1 == b.w1);
    CHECK(a.conv_w == b.conv_w);
    CHECK(a.w2 == b.w2);
    CHECK(a.w1 != d.w1);
    for (double v : a.b1) CHECK(v == 0.0);
    for (auto& ch : a.conv_b)
        for (double v : ch) CHECK(v == 0.0);
}

TEST_CASE("forward produces a probability distribution") {
    ModelConfig c = tiny_config();
    std::mt19937_64 rng(21);
    auto channels = random_channels(c, rng);
    UnifiedModelParams p = init_params(c, 9);
    TrainingExample ex = example_for(&channels, c, rng);
    auto probs = forward(p, ex);
    REQUIRE(static_cast<int>(probs.size()) == c.num_classes);
    double total = 0.0;
    for (double v : probs) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
    ModelConfig c = tiny_config();
    std::mt19937_64 rng(22);
    auto channels = random_channels(c, rng);
    std::vector<TrainingExample> batch;
    for (int i = 0; i < 5; ++i) batch.push_back(example_for(&channels, c, rng));

    UnifiedModelParams p = init_params(c, 4);
    auto [loss, grads] = loss_and_gradients(p, batch);
    CHECK(std::isfinite(loss));

    auto params_ptrs = all_weights(p);
    auto grad_ptrs = all_weights(grads);
    REQUIRE(params_ptrs.size() == grad_ptrs.size());

    const double step = 1e-5;
    double max_rel = 0.0;
    // Every 7th parameter keeps the unit test fast; the acceptance harness
    // sweeps all of them.
    for (std::size_t i = 0; i < params_ptrs.size(); i += 7) {
        double saved = *params_ptrs[i];
        *params_ptrs[i] = saved + step;
        double up = loss_and_gradients(p, batch).first;
        *params_ptrs[i] = saved - step;
        double down = loss_and_gradients(p, batch).first;
        *params_ptrs[i] = saved;
        double numeric = (up - down) / (2.0 * step);
        double analytic = *grad_ptrs[i];
        double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
        max_rel = std::max(max_rel, std::abs(numeric - analytic) / denom);
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("batch loss is invariant to example order and duplication") {
    ModelConfig c = tiny_config();
    std::mt19937_64 rng(23);
    auto channels = random_channels(c, rng);
    std::vector<TrainingExample> batch;
    for (int i = 0; i < 4; ++i) batch.push_back(example_for(&channels, c, rng));
    std::vector<TrainingExample> reversed(batch.rbegin(), batch.rend());
    std::vector<TrainingExample> doubled = batch;
    doubled.insert(doubled.end(), batch.begin(), batch.end());

    UnifiedModelParams p = init_params(c, 4);
    double a = loss_and_gradients(p, batch).first;
    double b = loss_and_gradients(p, reversed).first;
    double d = loss_and_gradients(p, doubled).first;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(a == doctest::Approx(d).epsilon(1e-12));
    CHECK_THROWS_AS(loss_and_gradients(p, {}), EmptyBatchError);
}

TEST_CASE("shape mismatches are rejected") {
    ModelConfig c = tiny_config();
    std::mt19937_64 rng(24);
    auto channels = random_channels(c, rng);
    UnifiedModelParams p = init_params(c, 4);
    TrainingExample ex = example_for(&channels, c, rng);

    std::vector<FeatureMatrix> wrong = channels;
    wrong[0].rows = 5;
    wrong[0].values.resize(5 * 4);
    TrainingExample bad = ex;
    bad.channels = &wrong;
    CHECK_THROWS_AS(forward(p, bad), ShapeMismatchError);
}

TEST_CASE("prediction order is by descending probability with index ties") {
    ModelConfig c = tiny_config();
    std::mt19937_64 rng(25);
    auto channels = random_channels(c, rng);
    UnifiedModelParams p = init_params(c, 4);
    TrainingExample ex = example_for(&channels, c, rng);
    auto probs = forward(p, ex);
    auto top = predict_topk(p, ex, c.num_classes);
    REQUIRE(static_cast<int>(top.size()) == c.num_classes);
    for (std::size_t i = 1; i < top.size(); ++i) {
        double prev = probs[static_cast<std::size_t>(top[i - 1])];
        double cur = probs[static_cast<std::size_t>(top[i])];
        CHECK((prev > cur || (prev == cur && top[i - 1] < top[i])));
    }
    CHECK_THROWS_AS(predict_topk(p, ex, 0), BadKError);
    CHECK_THROWS_AS(predict_topk(p, ex, c.num_classes + 1), BadKError);
}

TEST_CASE("training is deterministic and selects the best validation epoch") {
    ModelConfig c = tiny_config();
    std::mt19937_64 rng(26);
    auto channels = random_channels(c, rng);
    std::vector<TrainingExample> train_set, val_set;
    for (int i = 0; i < 24; ++i) train_set.push_back(example_for(&channels, c, rng));
    for (int i = 0; i < 8; ++i) val_set.push_back(example_for(&channels, c, rng));

    TrainOutcome a = train(c, train_set, val_set, 7);
    TrainOutcome b = train(c, train_set, val_set, 7);
    CHECK(a.params.w1 == b.params.w1);
    CHECK(a.params.conv_w == b.params.conv_w);
    REQUIRE(a.log.size() == 3);
    CHECK(a.log[0].epoch == 1);
    REQUIRE(a.log[0].val_loss.has_value());

    double best = a.log[0].val_loss.value();
    int best_epoch = 1;
    for (const auto& row : a.log)
        if (row.val_loss.value() < best) {
            best = row.val_loss.value();
            best_epoch = row.epoch;
        }
    CHECK(a.params.best_epoch == best_epoch);
    CHECK_THROWS_AS(train(c, {}, val_set, 7), EmptyBatchError);
}

TEST_CASE("zero epochs returns the initial parameters") {
    ModelConfig c = tiny_config();
    c.epochs = 0;
    std::mt19937_64 rng(27);
    auto channels = random_channels(c, rng);
    std::vector<TrainingExample> train_set;
    for (int i = 0; i < 8; ++i) train_set.push_back(example_for(&channels, c, rng));
    TrainOutcome out = train(c, train_set, {}, 11);
    CHECK(out.log.empty());
    CHECK(out.params.best_epoch == 0);
    UnifiedModelParams fresh = init_params(c, 11);
    CHECK(out.params.w1 == fresh.w1);
    CHECK(out.params.w2 == fresh.w2);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    ModelConfig c = tiny_config();
    std::mt19937_64 rng(28);
    auto channels = random_channels(c, rng);
    std::vector<TrainingExample> train_set;
    for (int i = 0; i < 16; ++i) train_set.push_back(example_for(&channels, c, rng));
    TrainOutcome out = train(c, train_set, {}, 13);

    std::string path = "/tmp/ucvf_test_ckpt_" + std::to_string(getpid());
    save_checkpoint(path, out.params);
    UnifiedModelParams back = load_checkpoint(path);
    std::remove(path.c_str());

    CHECK(back.seed == out.params.seed);
    CHECK(back.best_epoch == out.params.best_epoch);
    CHECK(back.conv_w == out.params.conv_w);
    CHECK(back.conv_b == out.params.conv_b);
    CHECK(back.w1 == out.params.w1);
    CHECK(back.b1 == out.params.b1);
    CHECK(back.w2 == out.params.w2);
    CHECK(back.b2 == out.params.b2);

    TrainingExample probe = example_for(&channels, c, rng);
    CHECK(forward(back, probe) == forward(out.params, probe));
    CHECK_THROWS_AS(load_checkpoint("/tmp/ucvf_no_such_ckpt"), IoError);
}

TEST_CASE("config validation rejects degenerate layouts") {
    ModelConfig c = tiny_config();
    c.channels.clear();
    CHECK_THROWS_AS(c.validate(), InvalidConfigError);
    c = tiny_config();
    c.pool = 7;  // pooling larger than the 6x4 maps zeroes a dimension
    CHECK_THROWS_AS(c.validate(), InvalidConfigError);
    c = tiny_config();
    c.num_classes = 0;
    CHECK_THROWS_AS(c.validate(), InvalidConfigError);
}
