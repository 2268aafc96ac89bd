#include "ucvf/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ucvf/errors.hpp"

namespace ucvf {

int ModelConfig::conv_feature_size() const {
    int total = 0;
    for (int ch = 0; ch < channel_count(); ++ch) total += channel_feature_size(ch);
    return total;
}

void ModelConfig::validate() const {
    if (channels.empty()) throw InvalidConfigError("model has no channels");
    if (filters_per_channel < 1) throw InvalidConfigError("filters_per_channel must be >= 1");
    if (kernel < 1 || kernel % 2 == 0)
        throw InvalidConfigError("kernel must be odd and >= 1, got " + std::to_string(kernel));
    if (pool < 1) throw InvalidConfigError("pool must be >= 1");
    if (hidden_size < 1) throw InvalidConfigError("hidden_size must be >= 1");
    if (num_classes < 2) throw InvalidConfigError("num_classes must be >= 2");
    if (!(learning_rate > 0.0)) throw InvalidConfigError("learning_rate must be positive");
    if (batch_size < 1) throw InvalidConfigError("batch_size must be >= 1");
    if (epochs < 0) throw InvalidConfigError("epochs must be >= 0");
    if (time_buckets < 1 || distance_buckets < 1)
        throw InvalidConfigError("context one-hot widths must be >= 1");
    for (int ch = 0; ch < channel_count(); ++ch) {
        const auto& s = channels[static_cast<std::size_t>(ch)];
        if (s.rows < 1 || s.cols < 1)
            throw InvalidConfigError("channel " + std::to_string(ch) + " has empty shape");
        if (pooled_rows(ch) < 1 || pooled_cols(ch) < 1)
            throw InvalidConfigError("channel " + std::to_string(ch) +
                                     " pools to a zero-size layer");
    }
}

UnifiedModelParams UnifiedModelParams::zeros(const ModelConfig& config) {
    UnifiedModelParams p;
    p.config = config;
    int k2 = config.kernel * config.kernel;
    p.conv_w.resize(static_cast<std::size_t>(config.channel_count()));
    p.conv_b.resize(static_cast<std::size_t>(config.channel_count()));
    for (int ch = 0; ch < config.channel_count(); ++ch) {
        p.conv_w[static_cast<std::size_t>(ch)].assign(
            static_cast<std::size_t>(config.filters_per_channel) * k2, 0.0);
        p.conv_b[static_cast<std::size_t>(ch)].assign(
            static_cast<std::size_t>(config.filters_per_channel), 0.0);
    }
    p.w1.assign(static_cast<std::size_t>(config.hidden_size) * config.input_size(), 0.0);
    p.b1.assign(static_cast<std::size_t>(config.hidden_size), 0.0);
    p.w2.assign(static_cast<std::size_t>(config.num_classes) * config.hidden_size, 0.0);
    p.b2.assign(static_cast<std::size_t>(config.num_classes), 0.0);
    return p;
}

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53 high bits -> [0, 1); identical across platforms for a fixed seed.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_pm(std::mt19937_64& rng, double limit) {
    return (2.0 * uniform01(rng) - 1.0) * limit;
}

UnifiedModelParams init_params_with(const ModelConfig& config, std::mt19937_64& rng) {
    config.validate();
    UnifiedModelParams p = UnifiedModelParams::zeros(config);
    int k2 = config.kernel * config.kernel;
    // Convolution fans are per input/output plane: fan_in = fan_out = k*k.
    double conv_limit = std::sqrt(6.0 / (2.0 * k2));
    for (int ch = 0; ch < config.channel_count(); ++ch)
        for (double& w : p.conv_w[static_cast<std::size_t>(ch)]) w = uniform_pm(rng, conv_limit);
    double w1_limit = std::sqrt(6.0 / (config.input_size() + config.hidden_size));
    for (double& w : p.w1) w = uniform_pm(rng, w1_limit);
    double w2_limit = std::sqrt(6.0 / (config.hidden_size + config.num_classes));
    for (double& w : p.w2) w = uniform_pm(rng, w2_limit);
    return p;
}

// Reusable per-example buffers; allocating these once per batch keeps the
// training loop allocation-free.
struct Workspace {
    std::vector<std::vector<double>> preact;  // per channel: filters x rows x cols
    std::vector<std::vector<int>> argmax;     // per pooled cell: preact index or -1
    std::vector<double> zero_input;           // stand-in matrix for masked channels
    std::vector<double> z, h_pre, h, logits, probs, dh_pre, dz;
    std::vector<int> chan_base;
    int ind_base = 0, time_base = 0, dist_base = 0;

    explicit Workspace(const ModelConfig& c) {
        std::size_t max_cells = 0;
        preact.resize(static_cast<std::size_t>(c.channel_count()));
        argmax.resize(static_cast<std::size_t>(c.channel_count()));
        chan_base.resize(static_cast<std::size_t>(c.channel_count()));
        int base = 0;
        for (int ch = 0; ch < c.channel_count(); ++ch) {
            const auto& s = c.channels[static_cast<std::size_t>(ch)];
            std::size_t cells = static_cast<std::size_t>(s.rows) * s.cols;
            max_cells = std::max(max_cells, cells);
            preact[static_cast<std::size_t>(ch)].assign(
                static_cast<std::size_t>(c.filters_per_channel) * cells, 0.0);
            argmax[static_cast<std::size_t>(ch)].assign(
                static_cast<std::size_t>(c.channel_feature_size(ch)), -1);
            chan_base[static_cast<std::size_t>(ch)] = base;
            base += c.channel_feature_size(ch);
        }
        ind_base = base;
        time_base = ind_base + c.channel_count();
        dist_base = time_base + c.time_buckets;
        zero_input.assign(max_cells, 0.0);
        z.assign(static_cast<std::size_t>(c.input_size()), 0.0);
        h_pre.assign(static_cast<std::size_t>(c.hidden_size), 0.0);
        h.assign(static_cast<std::size_t>(c.hidden_size), 0.0);
        logits.assign(static_cast<std::size_t>(c.num_classes), 0.0);
        probs.assign(static_cast<std::size_t>(c.num_classes), 0.0);
        dh_pre.assign(static_cast<std::size_t>(c.hidden_size), 0.0);
        dz.assign(static_cast<std::size_t>(c.input_size()), 0.0);
    }
};

void check_example(const ModelConfig& c, const TrainingExample& ex) {
    if (!ex.channels) throw ShapeMismatchError("example carries no channel matrices");
    if (static_cast<int>(ex.channels->size()) != c.channel_count())
        throw ShapeMismatchError("example has " + std::to_string(ex.channels->size()) +
                                 " channels, model expects " +
                                 std::to_string(c.channel_count()));
    for (int ch = 0; ch < c.channel_count(); ++ch) {
        const auto& m = (*ex.channels)[static_cast<std::size_t>(ch)];
        const auto& s = c.channels[static_cast<std::size_t>(ch)];
        if (m.rows != s.rows || m.cols != s.cols)
            throw ShapeMismatchError("channel " + std::to_string(ch) + " is " +
                                     std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                                     ", model expects " + std::to_string(s.rows) + "x" +
                                     std::to_string(s.cols));
    }
    if (ex.indicator < 0 || ex.indicator >= c.channel_count())
        throw ShapeMismatchError("indicator out of range");
    if (ex.time_bucket < 0 || ex.time_bucket >= c.time_buckets)
        throw ShapeMismatchError("time bucket out of range");
    if (ex.distance_bucket < 0 || ex.distance_bucket >= c.distance_buckets)
        throw ShapeMismatchError("distance bucket out of range");
}

const double* channel_input(const ModelConfig& c, const TrainingExample& ex, int ch,
                            const Workspace& ws) {
    if (c.applicability_mode == ApplicabilityMode::Mask && ch != ex.indicator)
        return ws.zero_input.data();
    return (*ex.channels)[static_cast<std::size_t>(ch)].values.data();
}

void forward_cached(const UnifiedModelParams& p, const TrainingExample& ex, Workspace& ws) {
    const ModelConfig& c = p.config;
    check_example(c, ex);
    int k = c.kernel, pad = (c.kernel - 1) / 2, k2 = k * k;

    std::fill(ws.z.begin(), ws.z.end(), 0.0);
    for (int ch = 0; ch < c.channel_count(); ++ch) {
        const auto& shape = c.channels[static_cast<std::size_t>(ch)];
        int R = shape.rows, C = shape.cols;
        const double* X = channel_input(c, ex, ch, ws);
        double* pre = ws.preact[static_cast<std::size_t>(ch)].data();
        for (int f = 0; f < c.filters_per_channel; ++f) {
            const double* W =
                p.conv_w[static_cast<std::size_t>(ch)].data() + static_cast<std::size_t>(f) * k2;
            double b = p.conv_b[static_cast<std::size_t>(ch)][static_cast<std::size_t>(f)];
            double* out = pre + static_cast<std::size_t>(f) * R * C;
            for (int i = 0; i < R; ++i) {
                for (int j = 0; j < C; ++j) {
                    double acc = b;
                    for (int u = 0; u < k; ++u) {
                        int ii = i + u - pad;
                        if (ii < 0 || ii >= R) continue;
                        const double* xrow = X + static_cast<std::size_t>(ii) * C;
                        const double* wrow = W + static_cast<std::size_t>(u) * k;
                        for (int v = 0; v < k; ++v) {
                            int jj = j + v - pad;
                            if (jj < 0 || jj >= C) continue;
                            acc += wrow[v] * xrow[jj];
                        }
                    }
                    out[static_cast<std::size_t>(i) * C + j] = acc;
                }
            }
        }
        // ReLU + max pool; the first strictly positive maximum wins so
        // gradient routing is deterministic.
        int PR = c.pooled_rows(ch), PC = c.pooled_cols(ch);
        double* zc = ws.z.data() + ws.chan_base[static_cast<std::size_t>(ch)];
        int* am = ws.argmax[static_cast<std::size_t>(ch)].data();
        for (int f = 0; f < c.filters_per_channel; ++f) {
            const double* plane = pre + static_cast<std::size_t>(f) * R * C;
            for (int pi = 0; pi < PR; ++pi) {
                for (int pj = 0; pj < PC; ++pj) {
                    double best = 0.0;
                    int best_idx = -1;
                    for (int di = 0; di < c.pool; ++di) {
                        int i = pi * c.pool + di;
                        for (int dj = 0; dj < c.pool; ++dj) {
                            int j = pj * c.pool + dj;
                            double v = plane[static_cast<std::size_t>(i) * C + j];
                            if (v > best) {
                                best = v;
                                best_idx = f * R * C + i * C + j;
                            }
                        }
                    }
                    int slot = f * PR * PC + pi * PC + pj;
                    zc[slot] = best;
                    am[slot] = best_idx;
                }
            }
        }
    }
    ws.z[static_cast<std::size_t>(ws.ind_base + ex.indicator)] = 1.0;
    ws.z[static_cast<std::size_t>(ws.time_base + ex.time_bucket)] = 1.0;
    ws.z[static_cast<std::size_t>(ws.dist_base + ex.distance_bucket)] = 1.0;

    int IN = c.input_size(), H = c.hidden_size, O = c.num_classes;
    const double* z = ws.z.data();
    for (int o = 0; o < H; ++o) {
        const double* row = p.w1.data() + static_cast<std::size_t>(o) * IN;
        double acc = p.b1[static_cast<std::size_t>(o)];
        for (int i = 0; i < IN; ++i) acc += row[i] * z[i];
        ws.h_pre[static_cast<std::size_t>(o)] = acc;
        ws.h[static_cast<std::size_t>(o)] = acc > 0.0 ? acc : 0.0;
    }
    const double* h = ws.h.data();
    double max_logit = -std::numeric_limits<double>::infinity();
    for (int q = 0; q < O; ++q) {
        const double* row = p.w2.data() + static_cast<std::size_t>(q) * H;
        double acc = p.b2[static_cast<std::size_t>(q)];
        for (int o = 0; o < H; ++o) acc += row[o] * h[o];
        ws.logits[static_cast<std::size_t>(q)] = acc;
        max_logit = std::max(max_logit, acc);
    }
    double denom = 0.0;
    for (int q = 0; q < O; ++q) {
        double e = std::exp(ws.logits[static_cast<std::size_t>(q)] - max_logit);
        ws.probs[static_cast<std::size_t>(q)] = e;
        denom += e;
    }
    for (int q = 0; q < O; ++q) ws.probs[static_cast<std::size_t>(q)] /= denom;
}

// Backward pass for one example; dlogits must already carry the batch
// scaling. Accumulates into g.
void backward_cached(const UnifiedModelParams& p, const TrainingExample& ex, Workspace& ws,
                     const std::vector<double>& dlogits, UnifiedModelParams& g) {
    const ModelConfig& c = p.config;
    int IN = c.input_size(), H = c.hidden_size, O = c.num_classes;

    std::fill(ws.dh_pre.begin(), ws.dh_pre.end(), 0.0);
    for (int q = 0; q < O; ++q) {
        double d = dlogits[static_cast<std::size_t>(q)];
        if (d == 0.0) continue;
        double* gw2 = g.w2.data() + static_cast<std::size_t>(q) * H;
        const double* w2 = p.w2.data() + static_cast<std::size_t>(q) * H;
        const double* h = ws.h.data();
        for (int o = 0; o < H; ++o) {
            gw2[o] += d * h[o];
            ws.dh_pre[static_cast<std::size_t>(o)] += d * w2[o];
        }
        g.b2[static_cast<std::size_t>(q)] += d;
    }
    for (int o = 0; o < H; ++o)
        if (!(ws.h_pre[static_cast<std::size_t>(o)] > 0.0))
            ws.dh_pre[static_cast<std::size_t>(o)] = 0.0;

    std::fill(ws.dz.begin(), ws.dz.end(), 0.0);
    const double* z = ws.z.data();
    for (int o = 0; o < H; ++o) {
        double d = ws.dh_pre[static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        double* gw1 = g.w1.data() + static_cast<std::size_t>(o) * IN;
        const double* w1 = p.w1.data() + static_cast<std::size_t>(o) * IN;
        double* dz = ws.dz.data();
        for (int i = 0; i < IN; ++i) {
            gw1[i] += d * z[i];
            dz[i] += d * w1[i];
        }
        g.b1[static_cast<std::size_t>(o)] += d;
    }

    int k = c.kernel, pad = (c.kernel - 1) / 2, k2 = k * k;
    for (int ch = 0; ch < c.channel_count(); ++ch) {
        const auto& shape = c.channels[static_cast<std::size_t>(ch)];
        int R = shape.rows, C = shape.cols;
        int PR = c.pooled_rows(ch), PC = c.pooled_cols(ch);
        const double* X = channel_input(c, ex, ch, ws);
        const double* dzc = ws.dz.data() + ws.chan_base[static_cast<std::size_t>(ch)];
        const int* am = ws.argmax[static_cast<std::size_t>(ch)].data();
        int plane = R * C;
        for (int f = 0; f < c.filters_per_channel; ++f) {
            double* gw =
                g.conv_w[static_cast<std::size_t>(ch)].data() + static_cast<std::size_t>(f) * k2;
            int slots = PR * PC;
            for (int s = 0; s < slots; ++s) {
                int slot = f * slots + s;
                double d = dzc[slot];
                int idx = am[slot];
                // idx < 0 means the pooled maximum was 0, where ReLU kills
                // the gradient.
                if (d == 0.0 || idx < 0) continue;
                int local = idx - f * plane;
                int i = local / C, j = local % C;
                g.conv_b[static_cast<std::size_t>(ch)][static_cast<std::size_t>(f)] += d;
                for (int u = 0; u < k; ++u) {
                    int ii = i + u - pad;
                    if (ii < 0 || ii >= R) continue;
                    const double* xrow = X + static_cast<std::size_t>(ii) * C;
                    for (int v = 0; v < k; ++v) {
                        int jj = j + v - pad;
                        if (jj < 0 || jj >= C) continue;
                        gw[static_cast<std::size_t>(u) * k + v] += d * xrow[jj];
                    }
                }
            }
        }
    }
}

double batch_pass(const UnifiedModelParams& p, const std::vector<const TrainingExample*>& batch,
                  Workspace& ws, UnifiedModelParams& g) {
    const ModelConfig& c = p.config;
    double inv = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    std::vector<double> dlogits(static_cast<std::size_t>(c.num_classes));
    for (const TrainingExample* ex : batch) {
        if (ex->target < 0 || ex->target >= c.num_classes)
            throw ShapeMismatchError("target label out of range for user " + ex->user_id);
        forward_cached(p, *ex, ws);
        double pt = ws.probs[static_cast<std::size_t>(ex->target)];
        loss -= std::log(pt) * inv;
        for (int q = 0; q < c.num_classes; ++q)
            dlogits[static_cast<std::size_t>(q)] =
                (ws.probs[static_cast<std::size_t>(q)] - (q == ex->target ? 1.0 : 0.0)) * inv;
        backward_cached(p, *ex, ws, dlogits, g);
    }
    return loss;
}

void apply_update(UnifiedModelParams& p, const UnifiedModelParams& g, double lr) {
    for (std::size_t ch = 0; ch < p.conv_w.size(); ++ch) {
        for (std::size_t i = 0; i < p.conv_w[ch].size(); ++i)
            p.conv_w[ch][i] -= lr * g.conv_w[ch][i];
        for (std::size_t i = 0; i < p.conv_b[ch].size(); ++i)
            p.conv_b[ch][i] -= lr * g.conv_b[ch][i];
    }
    for (std::size_t i = 0; i < p.w1.size(); ++i) p.w1[i] -= lr * g.w1[i];
    for (std::size_t i = 0; i < p.b1.size(); ++i) p.b1[i] -= lr * g.b1[i];
    for (std::size_t i = 0; i < p.w2.size(); ++i) p.w2[i] -= lr * g.w2[i];
    for (std::size_t i = 0; i < p.b2.size(); ++i) p.b2[i] -= lr * g.b2[i];
}

void zero_grads(UnifiedModelParams& g) {
    for (auto& v : g.conv_w) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : g.conv_b) std::fill(v.begin(), v.end(), 0.0);
    std::fill(g.w1.begin(), g.w1.end(), 0.0);
    std::fill(g.b1.begin(), g.b1.end(), 0.0);
    std::fill(g.w2.begin(), g.w2.end(), 0.0);
    std::fill(g.b2.begin(), g.b2.end(), 0.0);
}

// Mean cross-entropy and top-1 accuracy over a fixed set.
std::pair<double, double> evaluate_set(const UnifiedModelParams& p,
                                       const std::vector<TrainingExample>& set, Workspace& ws) {
    double loss = 0.0;
    std::size_t hits = 0;
    for (const auto& ex : set) {
        forward_cached(p, ex, ws);
        loss -= std::log(ws.probs[static_cast<std::size_t>(ex.target)]);
        int arg = 0;
        for (int q = 1; q < p.config.num_classes; ++q)
            if (ws.probs[static_cast<std::size_t>(q)] > ws.probs[static_cast<std::size_t>(arg)])
                arg = q;
        if (arg == ex.target) ++hits;
    }
    double n = static_cast<double>(set.size());
    return {loss / n, static_cast<double>(hits) / n};
}

}  // namespace

UnifiedModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    UnifiedModelParams p = init_params_with(config, rng);
    p.seed = seed;
    return p;
}

std::vector<double> forward(const UnifiedModelParams& params, const TrainingExample& ex) {
    Workspace ws(params.config);
    forward_cached(params, ex, ws);
    return ws.probs;
}

std::pair<double, UnifiedModelParams> loss_and_gradients(
    const UnifiedModelParams& params, const std::vector<TrainingExample>& batch) {
    if (batch.empty()) throw EmptyBatchError("gradient of an empty batch");
    Workspace ws(params.config);
    UnifiedModelParams g = UnifiedModelParams::zeros(params.config);
    std::vector<const TrainingExample*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& ex : batch) ptrs.push_back(&ex);
    double loss = batch_pass(params, ptrs, ws, g);
    return {loss, std::move(g)};
}

TrainOutcome train(const ModelConfig& config, const std::vector<TrainingExample>& train_examples,
                   const std::vector<TrainingExample>& val_examples, std::uint64_t seed) {
    config.validate();
    if (train_examples.empty()) throw EmptyBatchError("training set is empty");

    std::mt19937_64 rng(seed);
    UnifiedModelParams params = init_params_with(config, rng);
    params.seed = seed;

    TrainOutcome out;
    UnifiedModelParams best = params;
    double best_val = std::numeric_limits<double>::infinity();

    Workspace ws(config);
    UnifiedModelParams grads = UnifiedModelParams::zeros(config);
    std::size_t n = train_examples.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<const TrainingExample*> batch;
    batch.reserve(static_cast<std::size_t>(config.batch_size));

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        // Fisher-Yates with the raw engine keeps the permutation identical
        // across standard libraries.
        for (std::size_t i = n - 1; i > 0; --i) {
            std::size_t j = rng() % (i + 1);
            std::swap(order[i], order[j]);
        }
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
            std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.batch_size));
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) batch.push_back(&train_examples[order[i]]);
            zero_grads(grads);
            double loss = batch_pass(params, batch, ws, grads);
            if (!std::isfinite(loss))
                throw DivergenceError("training loss became non-finite at epoch " +
                                      std::to_string(epoch));
            loss_sum += loss * static_cast<double>(batch.size());
            apply_update(params, grads, config.learning_rate);
        }

        EpochLog row;
        row.epoch = epoch;
        row.train_loss = loss_sum / static_cast<double>(n);
        if (!val_examples.empty()) {
            auto [vloss, vtop1] = evaluate_set(params, val_examples, ws);
            if (!std::isfinite(vloss))
                throw DivergenceError("validation loss became non-finite at epoch " +
                                      std::to_string(epoch));
            row.val_loss = vloss;
            row.val_top1 = vtop1;
            if (vloss < best_val) {
                best_val = vloss;
                best = params;
                best.best_epoch = epoch;
            }
        }
        out.log.push_back(row);
    }

    if (val_examples.empty() || config.epochs == 0) {
        best = params;
        best.best_epoch = config.epochs;
    }
    out.params = std::move(best);
    return out;
}

std::vector<int> predict_topk(const UnifiedModelParams& params, const TrainingExample& ex,
                              int k) {
    int classes = params.config.num_classes;
    if (k < 1 || k > classes)
        throw BadKError("K must be in [1, " + std::to_string(classes) + "], got " +
                        std::to_string(k));
    std::vector<double> probs = forward(params, ex);
    std::vector<int> idx(static_cast<std::size_t>(classes));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        double pa = probs[static_cast<std::size_t>(a)], pb = probs[static_cast<std::size_t>(b)];
        if (pa != pb) return pa > pb;
        return a < b;
    });
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

namespace {

void write_tensor(std::ofstream& out, const std::string& name, const std::vector<double>& v) {
    out << "tensor " << name << ' ' << v.size() << "\n";
    char buf[40];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%a", v[i]);
        out << buf << ((i + 1) % 4 == 0 || i + 1 == v.size() ? "\n" : " ");
    }
}

std::string expect_key(std::istream& in, const std::string& key) {
    std::string k, v;
    if (!(in >> k >> v) || k != key)
        throw IoError("malformed checkpoint: expected '" + key + "', got '" + k + "'");
    return v;
}

void read_tensor(std::istream& in, const std::string& name, std::vector<double>& v,
                 std::size_t expected) {
    std::string tag, got_name, count_s;
    if (!(in >> tag >> got_name >> count_s) || tag != "tensor" || got_name != name)
        throw IoError("malformed checkpoint: expected tensor '" + name + "'");
    std::size_t count = std::stoull(count_s);
    if (count != expected)
        throw IoError("checkpoint tensor '" + name + "' has " + count_s + " values, expected " +
                      std::to_string(expected));
    v.resize(count);
    std::string tok;
    for (std::size_t i = 0; i < count; ++i) {
        if (!(in >> tok)) throw IoError("checkpoint tensor '" + name + "' is truncated");
        v[i] = std::strtod(tok.c_str(), nullptr);
    }
}

}  // namespace

void save_checkpoint(const std::string& path, const UnifiedModelParams& p) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    const ModelConfig& c = p.config;
    out << "UCVF-MODEL v1\n";
    out << "seed " << p.seed << "\n";
    out << "best_epoch " << p.best_epoch << "\n";
    out << "channels " << c.channel_count() << "\n";
    for (const auto& s : c.channels) out << "channel " << s.rows << ' ' << s.cols << "\n";
    out << "filters " << c.filters_per_channel << "\n";
    out << "kernel " << c.kernel << "\n";
    out << "pool " << c.pool << "\n";
    out << "hidden " << c.hidden_size << "\n";
    out << "classes " << c.num_classes << "\n";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", c.learning_rate);
    out << "learning_rate " << buf << "\n";
    out << "batch_size " << c.batch_size << "\n";
    out << "epochs " << c.epochs << "\n";
    out << "time_buckets " << c.time_buckets << "\n";
    out << "distance_buckets " << c.distance_buckets << "\n";
    out << "applicability_mode "
        << (c.applicability_mode == ApplicabilityMode::Mask ? "mask" : "indicator") << "\n";
    for (int ch = 0; ch < c.channel_count(); ++ch) {
        write_tensor(out, "conv_w." + std::to_string(ch),
                     p.conv_w[static_cast<std::size_t>(ch)]);
        write_tensor(out, "conv_b." + std::to_string(ch),
                     p.conv_b[static_cast<std::size_t>(ch)]);
    }
    write_tensor(out, "w1", p.w1);
    write_tensor(out, "b1", p.b1);
    write_tensor(out, "w2", p.w2);
    write_tensor(out, "b2", p.b2);
    out << "end\n";
    if (!out) throw IoError("failed writing checkpoint: " + path);
}

UnifiedModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    std::string magic, version;
    if (!(in >> magic >> version) || magic != "UCVF-MODEL" || version != "v1")
        throw IoError("not a model checkpoint: " + path);

    ModelConfig c;
    std::uint64_t seed = std::stoull(expect_key(in, "seed"));
    int best_epoch = std::stoi(expect_key(in, "best_epoch"));
    int n_channels = std::stoi(expect_key(in, "channels"));
    if (n_channels < 1) throw IoError("checkpoint declares no channels");
    for (int ch = 0; ch < n_channels; ++ch) {
        std::string key;
        ChannelShape s;
        if (!(in >> key >> s.rows >> s.cols) || key != "channel")
            throw IoError("malformed checkpoint: bad channel line");
        c.channels.push_back(s);
    }
    c.filters_per_channel = std::stoi(expect_key(in, "filters"));
    c.kernel = std::stoi(expect_key(in, "kernel"));
    c.pool = std::stoi(expect_key(in, "pool"));
    c.hidden_size = std::stoi(expect_key(in, "hidden"));
    c.num_classes = std::stoi(expect_key(in, "classes"));
    c.learning_rate = std::strtod(expect_key(in, "learning_rate").c_str(), nullptr);
    c.batch_size = std::stoi(expect_key(in, "batch_size"));
    c.epochs = std::stoi(expect_key(in, "epochs"));
    c.time_buckets = std::stoi(expect_key(in, "time_buckets"));
    c.distance_buckets = std::stoi(expect_key(in, "distance_buckets"));
    std::string mode = expect_key(in, "applicability_mode");
    if (mode == "mask")
        c.applicability_mode = ApplicabilityMode::Mask;
    else if (mode == "indicator")
        c.applicability_mode = ApplicabilityMode::Indicator;
    else
        throw IoError("unknown applicability_mode in checkpoint: " + mode);
    c.validate();

    UnifiedModelParams p = UnifiedModelParams::zeros(c);
    p.seed = seed;
    p.best_epoch = best_epoch;
    int k2 = c.kernel * c.kernel;
    for (int ch = 0; ch < n_channels; ++ch) {
        read_tensor(in, "conv_w." + std::to_string(ch), p.conv_w[static_cast<std::size_t>(ch)],
                    static_cast<std::size_t>(c.filters_per_channel) * k2);
        read_tensor(in, "conv_b." + std::to_string(ch), p.conv_b[static_cast<std::size_t>(ch)],
                    static_cast<std::size_t>(c.filters_per_channel));
    }
    read_tensor(in, "w1", p.w1, static_cast<std::size_t>(c.hidden_size) * c.input_size());
    read_tensor(in, "b1", p.b1, static_cast<std::size_t>(c.hidden_size));
    read_tensor(in, "w2", p.w2, static_cast<std::size_t>(c.num_classes) * c.hidden_size);
    read_tensor(in, "b2", p.b2, static_cast<std::size_t>(c.num_classes));
    std::string tail;
    if (!(in >> tail) || tail != "end") throw IoError("checkpoint missing end marker");
    return p;
}

}  // namespace ucvf
