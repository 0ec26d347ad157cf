#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "faprune/errors.hpp"
#include "faprune/model.hpp"

namespace faprune {

enum class Criterion { L1, L2, Std, Cosine };

const char* to_string(Criterion c);
Criterion criterion_from_string(const std::string& name); // throws ConfigError

// One score per output filter of a conv layer. Scores accumulate in double
// regardless of the model's parameter precision.
struct ImportanceScores {
    Criterion criterion = Criterion::L1;
    std::vector<double> values;
    std::vector<int> degenerate; // filters where the cosine reference collapsed

    int count() const { return static_cast<int>(values.size()); }
};

struct FilterRef {
    int layer = 0;  // conv ordinal
    int filter = 0;
    auto operator<=>(const FilterRef&) const = default;
};

// score_i = sum |w| over the filter's weights (bias excluded).
template <typename T>
ImportanceScores filter_l1(const ConvLayerT<T>& layer) {
    ImportanceScores s;
    s.criterion = Criterion::L1;
    s.values.reserve(static_cast<size_t>(layer.out_channels()));
    const int per = layer.weights_per_filter();
    for (int f = 0; f < layer.out_channels(); ++f) {
        const T* w = layer.filter_weights(f);
        double acc = 0.0;
        for (int i = 0; i < per; ++i) acc += std::abs(static_cast<double>(w[i]));
        s.values.push_back(acc);
    }
    return s;
}

template <typename T>
ImportanceScores filter_l2(const ConvLayerT<T>& layer) {
    ImportanceScores s;
    s.criterion = Criterion::L2;
    const int per = layer.weights_per_filter();
    for (int f = 0; f < layer.out_channels(); ++f) {
        const T* w = layer.filter_weights(f);
        double acc = 0.0;
        for (int i = 0; i < per; ++i) {
            const double v = static_cast<double>(w[i]);
            acc += v * v;
        }
        s.values.push_back(std::sqrt(acc));
    }
    return s;
}

// Population standard deviation of the filter's weight values.
template <typename T>
ImportanceScores filter_std(const ConvLayerT<T>& layer) {
    ImportanceScores s;
    s.criterion = Criterion::Std;
    const int per = layer.weights_per_filter();
    for (int f = 0; f < layer.out_channels(); ++f) {
        const T* w = layer.filter_weights(f);
        double mean = 0.0;
        for (int i = 0; i < per; ++i) mean += static_cast<double>(w[i]);
        mean /= per;
        double var = 0.0;
        for (int i = 0; i < per; ++i) {
            const double d = static_cast<double>(w[i]) - mean;
            var += d * d;
        }
        s.values.push_back(std::sqrt(var / per));
    }
    return s;
}

// Cosine distance (1 - cos) between each flattened filter and the layer-mean
// filter. Zero-norm filter or zero-norm mean scores 0 and is flagged.
template <typename T>
ImportanceScores filter_cosine(const ConvLayerT<T>& layer) {
    if (layer.out_channels() < 2)
        throw std::invalid_argument("filter_cosine: layer needs at least 2 filters");
    ImportanceScores s;
    s.criterion = Criterion::Cosine;
    const int per = layer.weights_per_filter();
    std::vector<double> mean(static_cast<size_t>(per), 0.0);
    for (int f = 0; f < layer.out_channels(); ++f) {
        const T* w = layer.filter_weights(f);
        for (int i = 0; i < per; ++i) mean[static_cast<size_t>(i)] += static_cast<double>(w[i]);
    }
    for (auto& v : mean) v /= layer.out_channels();
    double mean_norm = 0.0;
    for (double v : mean) mean_norm += v * v;
    mean_norm = std::sqrt(mean_norm);

    for (int f = 0; f < layer.out_channels(); ++f) {
        const T* w = layer.filter_weights(f);
        double dot = 0.0, norm = 0.0;
        for (int i = 0; i < per; ++i) {
            const double v = static_cast<double>(w[i]);
            dot += v * mean[static_cast<size_t>(i)];
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0 || mean_norm == 0.0) {
            s.values.push_back(0.0);
            s.degenerate.push_back(f);
        } else {
            double cosine = dot / (norm * mean_norm);
            cosine = std::clamp(cosine, -1.0, 1.0);
            s.values.push_back(1.0 - cosine);
        }
    }
    return s;
}

template <typename T>
ImportanceScores compute_scores(const ConvLayerT<T>& layer, Criterion c) {
    switch (c) {
    case Criterion::L1: return filter_l1(layer);
    case Criterion::L2: return filter_l2(layer);
    case Criterion::Std: return filter_std(layer);
    case Criterion::Cosine: return filter_cosine(layer);
    }
    throw std::invalid_argument("unknown criterion");
}

template <typename T>
std::vector<ImportanceScores> compute_all_scores(const ModelT<T>& model, Criterion c) {
    std::vector<ImportanceScores> all;
    for (int i = 0; i < model.conv_layer_count(); ++i) all.push_back(compute_scores(model.conv(i), c));
    return all;
}

// Each score divided by the mean score over the layer's unpruned filters,
// enabling cross-layer comparison. Errors when no filter is unpruned.
ImportanceScores normalized_scores(const ImportanceScores& scores,
                                   std::span<const FilterInfo> filters);

template <typename T>
ImportanceScores normalized_scores(const ImportanceScores& scores, const ConvLayerT<T>& layer) {
    return normalized_scores(scores, std::span<const FilterInfo>(layer.filters));
}

// The k globally smallest normalized scores, lexicographic (layer, filter)
// tie-break, k clamped to the eligible pool. Never selects an unpruned filter
// that is the last one standing in its layer. When exclude_pruned is false
// (hard-pruning schedule), already-pruned filters count toward k.
std::vector<FilterRef> select_bottom_k(const std::vector<ImportanceScores>& normalized,
                                       int k,
                                       const std::vector<std::vector<FilterInfo>>& states,
                                       bool exclude_pruned = true);

template <typename T>
std::vector<std::vector<FilterInfo>> filter_states(const ModelT<T>& model) {
    std::vector<std::vector<FilterInfo>> states;
    for (int i = 0; i < model.conv_layer_count(); ++i) states.push_back(model.conv(i).filters);
    return states;
}

} // namespace faprune
