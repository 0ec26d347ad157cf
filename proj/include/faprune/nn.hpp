#pragma once

#include <algorithm>
#include <random>
#include <span>

#include "faprune/dataset.hpp"
#include "faprune/errors.hpp"
#include "faprune/model.hpp"

namespace faprune {

struct TrainConfig {
    double learning_rate = 0.05;
    int batch_size = 16;
    int epochs = 10;
    std::uint64_t rng_seed = 42;

    void validate() const {
        if (learning_rate <= 0) throw ConfigError("learning_rate must be > 0");
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (epochs < 0) throw ConfigError("epochs must be >= 0");
    }
};

// Numerically stable softmax + cross-entropy for one sample.
// grad_logits = softmax(logits) - one_hot(label).
template <typename T>
std::pair<double, std::vector<T>> softmax_xent(std::span<const T> logits, int label) {
    const int n = static_cast<int>(logits.size());
    if (label < 0 || label >= n)
        throw std::invalid_argument("softmax_xent: label " + std::to_string(label) +
                                    " out of range [0," + std::to_string(n) + ")");
    T maxv = logits[0];
    for (int i = 1; i < n; ++i) maxv = std::max(maxv, logits[i]);
    double sum = 0.0;
    std::vector<double> exps(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        exps[static_cast<size_t>(i)] = std::exp(static_cast<double>(logits[i] - maxv));
        sum += exps[static_cast<size_t>(i)];
    }
    const double loss = std::log(sum) - static_cast<double>(logits[label] - maxv);
    std::vector<T> grad(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        grad[static_cast<size_t>(i)] =
            static_cast<T>(exps[static_cast<size_t>(i)] / sum - (i == label ? 1.0 : 0.0));
    return {loss, std::move(grad)};
}

// Batch head: mean loss, per-sample gradients divided by batch size.
template <typename T>
std::pair<double, TensorT<T>> softmax_xent_batch(const TensorT<T>& logits,
                                                 std::span<const int> labels) {
    require_shape(logits, 2, "softmax_xent_batch logits");
    const int n = logits.dim(0), classes = logits.dim(1);
    if (static_cast<int>(labels.size()) != n)
        throw std::invalid_argument("softmax_xent_batch: label count mismatch");
    TensorT<T> grad(logits.shape);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        auto [loss, g] = softmax_xent<T>(
            std::span<const T>(logits.data.data() + static_cast<size_t>(i) * classes,
                               static_cast<size_t>(classes)),
            labels[static_cast<size_t>(i)]);
        total += loss;
        for (int j = 0; j < classes; ++j)
            grad.at(i, j) = g[static_cast<size_t>(j)] / static_cast<T>(n);
    }
    return {total / n, std::move(grad)};
}

// Masked update: w_i <- w_i - lr * (g_i * mask_i); the filter's bias shares
// the same per-filter mask factor.
template <typename T>
void sgd_step_masked(ConvLayerT<T>& layer, const LayerGradsT<T>& grads,
                     std::span<const double> mask, double lr) {
    if (static_cast<int>(mask.size()) != layer.out_channels())
        throw std::invalid_argument("sgd_step_masked: mask length " +
                                    std::to_string(mask.size()) + " != filter count " +
                                    std::to_string(layer.out_channels()));
    if (grads.weights.shape != layer.weights.shape)
        throw std::invalid_argument("sgd_step_masked: gradient shape mismatch");
    const int per = layer.weights_per_filter();
    for (int f = 0; f < layer.out_channels(); ++f) {
        const T m = static_cast<T>(mask[static_cast<size_t>(f)]);
        T* w = layer.filter_weights(f);
        const T* gw = grads.weights.data.data() + static_cast<size_t>(f) * per;
        for (int i = 0; i < per; ++i) w[i] -= static_cast<T>(lr) * (gw[i] * m);
        layer.bias[static_cast<size_t>(f)] -=
            static_cast<T>(lr) * (grads.bias[static_cast<size_t>(f)] * m);
    }
}

template <typename T>
void sgd_step(DenseLayerT<T>& layer, const LayerGradsT<T>& grads, double lr) {
    for (int i = 0; i < layer.weights.size(); ++i)
        layer.weights.data[static_cast<size_t>(i)] -=
            static_cast<T>(lr) * grads.weights.data[static_cast<size_t>(i)];
    for (size_t i = 0; i < layer.bias.size(); ++i)
        layer.bias[i] -= static_cast<T>(lr) * grads.bias[i];
}

// Per-conv-layer gradient masks; empty means all-ones everywhere.
using GradMasks = std::vector<std::vector<double>>;

template <typename T>
TensorT<T> convert_images(const Tensor& images) {
    if constexpr (std::is_same_v<T, float>) {
        return images;
    } else {
        TensorT<T> out(images.shape);
        for (int i = 0; i < images.size(); ++i)
            out.data[static_cast<size_t>(i)] = static_cast<T>(images.data[static_cast<size_t>(i)]);
        return out;
    }
}

namespace detail {

template <typename T>
TensorT<T> gather_batch(const TensorT<T>& images, std::span<const int> idx) {
    const int c = images.dim(1), h = images.dim(2), w = images.dim(3);
    const int stride = c * h * w;
    TensorT<T> out({static_cast<int>(idx.size()), c, h, w});
    for (size_t i = 0; i < idx.size(); ++i)
        std::copy_n(images.data.data() + static_cast<size_t>(idx[i]) * stride, stride,
                    out.data.data() + i * stride);
    return out;
}

} // namespace detail

// One pass over the data in seeded-shuffle order; returns mean training loss.
// With an empty mask set this is plain mini-batch SGD.
template <typename T>
double train_epoch(ModelT<T>& model, const Dataset& data, const TrainConfig& cfg,
                   std::mt19937_64& rng, const GradMasks& masks = {}) {
    if (data.size() == 0) throw std::invalid_argument("train_epoch: empty dataset");
    std::vector<int> order(static_cast<size_t>(data.size()));
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::shuffle(order.begin(), order.end(), rng);

    const auto conv_idx = model.conv_indices();
    if (!masks.empty() && masks.size() != conv_idx.size())
        throw std::invalid_argument("train_epoch: mask set size != conv layer count");

    GradMasks effective = masks;
    if (effective.empty()) {
        effective.reserve(conv_idx.size());
        for (int li : conv_idx)
            effective.emplace_back(
                static_cast<size_t>(std::get<ConvLayerT<T>>(model.layers[static_cast<size_t>(li)]).out_channels()),
                1.0);
    }

    TensorT<T> images = convert_images<T>(data.images);
    double loss_sum = 0.0;
    int batches = 0;
    for (int start = 0; start < data.size(); start += cfg.batch_size) {
        const int count = std::min(cfg.batch_size, data.size() - start);
        std::span<const int> idx(order.data() + start, static_cast<size_t>(count));
        TensorT<T> batch = detail::gather_batch(images, idx);
        std::vector<int> labels(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i)
            labels[static_cast<size_t>(i)] =
                data.labels[static_cast<size_t>(idx[static_cast<size_t>(i)])];

        ForwardTraceT<T> trace = model_forward(model, batch);
        auto [loss, grad_logits] = softmax_xent_batch(trace.output(), labels);
        ModelGradsT<T> grads = model_backward(model, trace, grad_logits);

        int conv_ordinal = 0;
        for (size_t li = 0; li < model.layers.size(); ++li) {
            if (auto* cv = std::get_if<ConvLayerT<T>>(&model.layers[li])) {
                sgd_step_masked(*cv, grads.per_layer[li],
                                effective[static_cast<size_t>(conv_ordinal)], cfg.learning_rate);
                ++conv_ordinal;
            } else if (auto* dn = std::get_if<DenseLayerT<T>>(&model.layers[li])) {
                sgd_step(*dn, grads.per_layer[li], cfg.learning_rate);
            }
        }
        loss_sum += loss;
        ++batches;
    }
    return batches ? loss_sum / batches : 0.0;
}

// Classification accuracy; argmax ties resolve to the lowest class index.
template <typename T>
double evaluate(const ModelT<T>& model, const Dataset& data, int batch_size = 64) {
    if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
    TensorT<T> images = convert_images<T>(data.images);
    int correct = 0;
    for (int start = 0; start < data.size(); start += batch_size) {
        const int count = std::min(batch_size, data.size() - start);
        std::vector<int> idx(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i) idx[static_cast<size_t>(i)] = start + i;
        TensorT<T> batch = detail::gather_batch(images, idx);
        ForwardTraceT<T> trace = model_forward(model, batch);
        const TensorT<T>& logits = trace.output();
        for (int i = 0; i < count; ++i) {
            int best = 0;
            for (int j = 1; j < logits.dim(1); ++j)
                if (logits.at(i, j) > logits.at(i, best)) best = j;
            if (best == data.labels[static_cast<size_t>(start + i)]) ++correct;
        }
    }
    return static_cast<double>(correct) / data.size();
}

} // namespace faprune
