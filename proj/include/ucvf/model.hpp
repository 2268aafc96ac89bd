#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ucvf/features.hpp"

namespace ucvf {

struct ChannelShape {
    int rows = 0;
    int cols = 0;
};

// How the applicability assignment conditions the network: as a one-hot
// indicator feature appended to the flattened inputs (default), or by
// zeroing the input matrices of every channel except the assigned one.
enum class ApplicabilityMode { Indicator, Mask };

struct ModelConfig {
    std::vector<ChannelShape> channels;  // one per (context, view) pair
    int filters_per_channel = 8;
    int kernel = 3;  // square, odd; zero-pad (kernel-1)/2, stride 1
    int pool = 2;    // square max pool, stride = pool, floor on odd dims
    int hidden_size = 128;
    int num_classes = 9;
    double learning_rate = 0.01;
    int batch_size = 32;
    int epochs = 30;
    int time_buckets = 24;
    int distance_buckets = 4;
    ApplicabilityMode applicability_mode = ApplicabilityMode::Indicator;

    int pooled_rows(int ch) const { return channels[static_cast<std::size_t>(ch)].rows / pool; }
    int pooled_cols(int ch) const { return channels[static_cast<std::size_t>(ch)].cols / pool; }
    int channel_feature_size(int ch) const {
        return filters_per_channel * pooled_rows(ch) * pooled_cols(ch);
    }
    int channel_count() const { return static_cast<int>(channels.size()); }
    int conv_feature_size() const;
    // Flattened channel features + indicator + time one-hot + distance one-hot.
    int input_size() const {
        return conv_feature_size() + channel_count() + time_buckets + distance_buckets;
    }
    // Throws InvalidConfigError on any zero-size layer or nonsensical field.
    void validate() const;
};

// One training or evaluation example. The channel matrices are shared
// across all of a user's examples and are expected to be normalised.
struct TrainingExample {
    std::string user_id;
    const std::vector<FeatureMatrix>* channels = nullptr;
    int indicator = 0;  // assigned pair index, one-hot over channel count
    int time_bucket = 0;
    int distance_bucket = 0;
    int target = 0;  // label index in the target view
};

// Parameters; also reused as the congruent gradient structure.
struct UnifiedModelParams {
    ModelConfig config;
    std::uint64_t seed = 0;
    int best_epoch = 0;  // epoch the returned parameters come from (0 = initial)
    // Per channel: filters*kernel*kernel weights (filter-major, kernel
    // row-major) and one bias per filter.
    std::vector<std::vector<double>> conv_w;
    std::vector<std::vector<double>> conv_b;
    std::vector<double> w1;  // hidden_size x input_size, row-major
    std::vector<double> b1;
    std::vector<double> w2;  // num_classes x hidden_size, row-major
    std::vector<double> b2;

    static UnifiedModelParams zeros(const ModelConfig& config);
};

// Xavier-uniform weights (limit sqrt(6/(fan_in+fan_out)); convolution
// filters use per-plane fans fan_in = fan_out = kernel*kernel), zero biases.
// Deterministic for a fixed seed.
UnifiedModelParams init_params(const ModelConfig& config, std::uint64_t seed);

// Softmax probabilities over the target labels. Throws ShapeMismatchError
// when the example does not match the config.
std::vector<double> forward(const UnifiedModelParams& params, const TrainingExample& ex);

// Mean cross-entropy over the batch plus exact gradients, congruent to the
// parameter structure. Throws EmptyBatchError on an empty batch.
std::pair<double, UnifiedModelParams> loss_and_gradients(
    const UnifiedModelParams& params, const std::vector<TrainingExample>& batch);

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    std::optional<double> val_loss;  // absent when the validation set is empty
    std::optional<double> val_top1;
};

struct TrainOutcome {
    UnifiedModelParams params;  // best validation loss (last epoch if no val data)
    std::vector<EpochLog> log;
};

// Plain mini-batch gradient descent with a seeded shuffle each epoch.
// Deterministic for fixed (config, data, seed). Throws DivergenceError if
// the loss turns non-finite, EmptyBatchError on an empty training set.
TrainOutcome train(const ModelConfig& config, const std::vector<TrainingExample>& train_examples,
                   const std::vector<TrainingExample>& val_examples, std::uint64_t seed);

// Top-K label indices, probabilities strictly descending, ties broken by
// ascending label index. Throws BadKError unless 1 <= K <= num_classes.
std::vector<int> predict_topk(const UnifiedModelParams& params, const TrainingExample& ex, int k);

// Text checkpoint with hexfloat tensors; loading reproduces predictions
// bit-exactly. Throws IoError on unreadable or malformed files.
void save_checkpoint(const std::string& path, const UnifiedModelParams& params);
UnifiedModelParams load_checkpoint(const std::string& path);

}  // namespace ucvf
