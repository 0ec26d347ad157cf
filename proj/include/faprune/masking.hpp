#pragma once

#include <span>
#include <vector>

#include "faprune/criteria.hpp"
#include "faprune/errors.hpp"
#include "faprune/model.hpp"

namespace faprune {

// Per-filter multiplier in {0, F_a, 1}: 0 = pruned, F_a = selected for
// attenuation this round, 1 = untouched.
using LayerMask = std::vector<double>;

enum class MaskMode {
    WeightAttenuation, // scale weights once per selection event; grads masked 0 for pruned
    GradientMask       // leave weights alone; grads scaled by {0, F_a, 1}
};

const char* to_string(MaskMode m);
MaskMode mask_mode_from_string(const std::string& name);

// All schedule hyperparameters of the pruning run.
struct PruneConfig {
    double fa = 0.8;       // attenuation factor in (0,1)
    double alpha = 0.7;    // attenuation threshold (relative to layer mean)
    double beta = 0.01;    // prune threshold (relative), beta < alpha
    int k0 = 0;            // initial attenuation count
    int a = 100;           // per-round increment of k
    double t1 = 0.05;      // permitted accuracy drop (fraction)
    double t2 = -1.0;      // absolute near-zero L1 prune threshold; < 0 derives
                           // per-layer as t2_rel * initial mean filter L1
    double t2_rel = 1e-6;
    Criterion criterion = Criterion::L1;
    double target_prune_fraction = 0.5;
    MaskMode mode = MaskMode::WeightAttenuation;
    int finetune_epochs = 2;
    int warmup_max_epochs = 40;
    double warmup_floor = 0.9;   // abort when warm-up cannot reach this accuracy
    int max_rounds = 500;        // termination backstop

    void validate() const;
};

// Eq.-(3)-style hard mask: 0 where score < alpha * mean(unpruned scores),
// else 1. Empty state span treats every filter as unpruned.
LayerMask compute_mask_hard(std::span<const double> scores, double alpha,
                            std::span<const FilterInfo> filters = {});

// Eq.-(5)-style three-valued mask: 0 below beta*mean, F_a in
// [beta*mean, alpha*mean), 1 otherwise. beta == alpha degenerates to the
// hard partition; beta > alpha is a configuration error.
LayerMask compute_mask_attenuate(std::span<const double> scores, double alpha, double beta,
                                 double fa, std::span<const FilterInfo> filters = {});

// Multiplies the selected filters' weights and bias by fa (when
// scale_weights; GradientMask mode only updates the lifecycle state) and
// marks them Attenuated. Selecting a pruned filter is an error.
template <typename T>
void apply_attenuation(ModelT<T>& model, const std::vector<FilterRef>& selection, double fa,
                       bool scale_weights = true) {
    for (const FilterRef& r : selection) {
        ConvLayerT<T>& layer = model.conv(r.layer);
        FilterInfo& info = layer.filters.at(static_cast<size_t>(r.filter));
        if (info.state == FilterState::Pruned)
            throw std::invalid_argument("apply_attenuation: filter (" + std::to_string(r.layer) +
                                        "," + std::to_string(r.filter) + ") is pruned");
        if (scale_weights) {
            T* w = layer.filter_weights(r.filter);
            const int per = layer.weights_per_filter();
            for (int i = 0; i < per; ++i) w[i] = static_cast<T>(w[i] * static_cast<T>(fa));
            layer.bias[static_cast<size_t>(r.filter)] =
                static_cast<T>(layer.bias[static_cast<size_t>(r.filter)] * static_cast<T>(fa));
        }
        info.state = FilterState::Attenuated;
        info.attenuation_count += 1;
    }
}

// Pre-zeroing copy of the filters removed by one prune_zeroed call; consumed
// by a single rollback.
template <typename T>
struct PruneSnapshotT {
    struct Entry {
        FilterRef ref;
        std::vector<T> weights;
        T bias;
    };
    std::vector<Entry> entries;
    bool valid = false;
};

template <typename T>
struct PruneOutcomeT {
    std::vector<FilterRef> pruned;
    PruneSnapshotT<T> snapshot;
};

// Zeroes every unpruned filter whose raw L1 norm is strictly below its
// layer's threshold and marks it Pruned. Keeps the largest-L1 filter of a
// layer alive when the threshold would otherwise empty it.
template <typename T>
PruneOutcomeT<T> prune_zeroed(ModelT<T>& model, std::span<const double> t2_per_layer) {
    const int conv_count = model.conv_layer_count();
    if (static_cast<int>(t2_per_layer.size()) != conv_count)
        throw std::invalid_argument("prune_zeroed: threshold count != conv layer count");
    for (double t : t2_per_layer)
        if (t < 0) throw std::invalid_argument("prune_zeroed: negative threshold");

    PruneOutcomeT<T> out;
    out.snapshot.valid = true;
    for (int l = 0; l < conv_count; ++l) {
        ConvLayerT<T>& layer = model.conv(l);
        const ImportanceScores l1 = filter_l1(layer);
        const double t2 = t2_per_layer[static_cast<size_t>(l)];

        std::vector<int> below;
        int keep = -1; // guard candidate: largest-L1 unpruned filter
        for (int f = 0; f < layer.out_channels(); ++f) {
            if (layer.filters[static_cast<size_t>(f)].state == FilterState::Pruned) continue;
            if (keep < 0 || l1.values[static_cast<size_t>(f)] > l1.values[static_cast<size_t>(keep)])
                keep = f;
            if (l1.values[static_cast<size_t>(f)] < t2) below.push_back(f);
        }
        const bool would_empty = keep >= 0 && static_cast<int>(below.size()) == layer.active_filter_count();
        for (int f : below) {
            if (would_empty && f == keep) continue;
            typename PruneSnapshotT<T>::Entry entry;
            entry.ref = FilterRef{l, f};
            const T* w = layer.filter_weights(f);
            entry.weights.assign(w, w + layer.weights_per_filter());
            entry.bias = layer.bias[static_cast<size_t>(f)];
            out.snapshot.entries.push_back(std::move(entry));

            T* wm = layer.filter_weights(f);
            std::fill(wm, wm + layer.weights_per_filter(), T(0));
            layer.bias[static_cast<size_t>(f)] = T(0);
            layer.filters[static_cast<size_t>(f)].state = FilterState::Pruned;
            out.pruned.push_back(FilterRef{l, f});
        }
    }
    return out;
}

template <typename T>
PruneOutcomeT<T> prune_zeroed(ModelT<T>& model, double t2) {
    std::vector<double> per_layer(static_cast<size_t>(model.conv_layer_count()), t2);
    return prune_zeroed(model, std::span<const double>(per_layer));
}

// Zeroes and freezes exactly the given filters (hard-pruning semantics);
// refs that are already pruned are skipped. Returns the newly pruned set
// plus a rollback snapshot.
template <typename T>
PruneOutcomeT<T> prune_selected(ModelT<T>& model, const std::vector<FilterRef>& refs) {
    PruneOutcomeT<T> out;
    out.snapshot.valid = true;
    for (const FilterRef& r : refs) {
        ConvLayerT<T>& layer = model.conv(r.layer);
        FilterInfo& info = layer.filters.at(static_cast<size_t>(r.filter));
        if (info.state == FilterState::Pruned) continue;
        if (layer.active_filter_count() <= 1)
            throw RunError("prune_selected: starvation guard refuses to empty conv layer " +
                           std::to_string(r.layer));
        typename PruneSnapshotT<T>::Entry entry;
        entry.ref = r;
        const T* w = layer.filter_weights(r.filter);
        entry.weights.assign(w, w + layer.weights_per_filter());
        entry.bias = layer.bias[static_cast<size_t>(r.filter)];
        out.snapshot.entries.push_back(std::move(entry));

        T* wm = layer.filter_weights(r.filter);
        std::fill(wm, wm + layer.weights_per_filter(), T(0));
        layer.bias[static_cast<size_t>(r.filter)] = T(0);
        info.state = FilterState::Pruned;
        out.pruned.push_back(r);
    }
    return out;
}

// Restores the filters captured by a snapshot (weights, bias) into the given
// state. A snapshot can be consumed once.
template <typename T>
void restore_snapshot(ModelT<T>& model, PruneSnapshotT<T>& snapshot, FilterState into_state) {
    if (!snapshot.valid)
        throw RunError("rollback: no snapshot available (already consumed?)");
    for (const auto& entry : snapshot.entries) {
        ConvLayerT<T>& layer = model.conv(entry.ref.layer);
        T* w = layer.filter_weights(entry.ref.filter);
        std::copy(entry.weights.begin(), entry.weights.end(), w);
        layer.bias[static_cast<size_t>(entry.ref.filter)] = entry.bias;
        layer.filters[static_cast<size_t>(entry.ref.filter)].state = into_state;
    }
    snapshot.valid = false;
}

// Fig.-3 line 12: exactly the filters pruned by the most recent prune call
// get their pre-prune parameters back and return to Attenuated.
template <typename T>
void rollback_last_prune(ModelT<T>& model, PruneSnapshotT<T>& snapshot) {
    restore_snapshot(model, snapshot, FilterState::Attenuated);
}

// A filter selected last round but not this round, and not pruned meanwhile,
// has recovered: count it and return it to Active.
template <typename T>
std::vector<FilterRef> record_recovery(ModelT<T>& model, const std::vector<FilterRef>& previous,
                                       const std::vector<FilterRef>& current) {
    std::vector<FilterRef> cur_sorted = current;
    std::sort(cur_sorted.begin(), cur_sorted.end());
    std::vector<FilterRef> recovered;
    for (const FilterRef& r : previous) {
        if (std::binary_search(cur_sorted.begin(), cur_sorted.end(), r)) continue;
        FilterInfo& info = model.conv(r.layer).filters.at(static_cast<size_t>(r.filter));
        if (info.state == FilterState::Pruned) continue;
        info.recovery_count += 1;
        info.state = FilterState::Active;
        recovered.push_back(r);
    }
    return recovered;
}

} // namespace faprune
