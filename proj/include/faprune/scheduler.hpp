#pragma once

#include <functional>

#include "faprune/experiment_log.hpp"
#include "faprune/nn.hpp"

namespace faprune {

// Optional observation points; used by tests and for progress printing.
struct SchedulerHooks {
    std::function<void(const Model&, int round)> before_prune;
    std::function<void(const Model&, int round)> after_rollback;
    std::function<void(const std::string&)> info;
};

struct ScheduleResult {
    Model model;
    ExperimentLog log;
};

// The full pruning loop: warm up, then per round raise k by a, select the
// bottom-k filters, attenuate them, fine-tune, sweep near-zero filters into
// Pruned, apply the T1 accuracy gates (with rollback of the last prune when
// accuracy is unacceptable), until the target prune fraction is reached.
ScheduleResult run_attenuation_pruning(Model model, const Dataset& train_data,
                                       const Dataset& val_data, const PruneConfig& config,
                                       const TrainConfig& train_config,
                                       const SchedulerHooks& hooks = {});

// Identical schedule, but the selected filters are zeroed and frozen
// immediately (hard-pruning baseline): no attenuation, no recovery, and
// already-pruned filters stay inside the bottom-k pool.
ScheduleResult run_hard_pruning(Model model, const Dataset& train_data, const Dataset& val_data,
                                const PruneConfig& config, const TrainConfig& train_config,
                                const SchedulerHooks& hooks = {});

// ------------------------------------------------------------ diagnostics

// Aggregate magnitude (batch-averaged L1) of the candidate filters' feature
// maps pushed through the next conv layer's matching input channels: the
// contribution those filters make to the following layer's pre-activations.
// Diagnostic only; selection never uses it.
template <typename T>
double next_layer_impact(const ModelT<T>& model, int conv_ordinal,
                         const std::vector<FilterRef>& candidates, const TensorT<T>& probe_batch) {
    const std::vector<int> conv_idx = model.conv_indices();
    const int conv_count = static_cast<int>(conv_idx.size());
    if (conv_ordinal < 0 || conv_ordinal >= conv_count)
        throw std::invalid_argument("next_layer_impact: conv ordinal out of range");
    if (conv_ordinal == conv_count - 1)
        throw std::invalid_argument("next_layer_impact: last conv layer has no next conv layer");
    for (const FilterRef& r : candidates)
        if (r.layer != conv_ordinal)
            throw std::invalid_argument("next_layer_impact: candidate set spans layers");
    if (candidates.empty()) return 0.0;

    const int li = conv_idx[static_cast<size_t>(conv_ordinal)];
    const int lj = conv_idx[static_cast<size_t>(conv_ordinal + 1)];
    for (int i = li + 1; i < lj; ++i) {
        const auto& layer = model.layers[static_cast<size_t>(i)];
        if (!std::holds_alternative<ReluLayer>(layer) && !std::holds_alternative<MaxPoolLayer>(layer))
            throw std::invalid_argument(
                "next_layer_impact: only relu/maxpool supported between conv layers");
    }
    require_shape(probe_batch, 4, "next_layer_impact probe");
    if (probe_batch.dim(0) < 1)
        throw std::invalid_argument("next_layer_impact: empty probe batch");

    ForwardTraceT<T> trace = model_forward(model, probe_batch);
    const TensorT<T>& feat = trace.acts[static_cast<size_t>(lj)]; // input of the next conv

    TensorT<T> masked(feat.shape);
    const int n = feat.dim(0), c = feat.dim(1), hw = feat.dim(2) * feat.dim(3);
    for (const FilterRef& r : candidates) {
        if (r.filter < 0 || r.filter >= c)
            throw std::invalid_argument("next_layer_impact: candidate filter out of range");
        for (int i = 0; i < n; ++i)
            std::copy_n(feat.data.data() + (static_cast<size_t>(i) * c + r.filter) * hw, hw,
                        masked.data.data() + (static_cast<size_t>(i) * c + r.filter) * hw);
    }

    ConvLayerT<T> next = std::get<ConvLayerT<T>>(model.layers[static_cast<size_t>(lj)]);
    std::fill(next.bias.begin(), next.bias.end(), T(0));
    TensorT<T> out = conv2d_forward(masked, next, model.exec);

    double total = 0.0;
    for (const T& v : out.data) total += std::abs(static_cast<double>(v));
    return total / probe_batch.dim(0);
}

// ------------------------------------------------------------- compaction

struct CompactStats {
    std::int64_t params_before = 0, params_after = 0;
    std::int64_t macs_before = 0, macs_after = 0;
    int filters_removed = 0;

    double param_reduction() const {
        return params_before ? 1.0 - static_cast<double>(params_after) / params_before : 0.0;
    }
    double mac_reduction() const {
        return macs_before ? 1.0 - static_cast<double>(macs_after) / macs_before : 0.0;
    }
};

template <typename T>
struct CompactResultT {
    ModelT<T> model;
    CompactStats stats;
};

// Physically removes Pruned filters and the dependent input channels of the
// following conv (or the matching dense columns after flatten). The result
// computes the same function as the masked model.
template <typename T>
CompactResultT<T> compact_model(const ModelT<T>& model) {
    for (int i = 0; i < model.conv_layer_count(); ++i)
        if (model.conv(i).active_filter_count() < 1)
            throw std::invalid_argument("compact_model: conv layer " + std::to_string(i) +
                                        " has no active filters");

    CompactResultT<T> result;
    result.stats.params_before = parameter_count(model);
    result.stats.macs_before = mac_count(model);
    result.stats.filters_removed = model.pruned_filters();

    ModelT<T>& out = result.model;
    out.input_shape = model.input_shape;
    out.exec = model.exec;

    // kept[i] = original channel id of compacted channel i at the current
    // 4-d stage; input channels are never pruned.
    std::vector<int> kept(static_cast<size_t>(model.input_shape[0]));
    for (size_t i = 0; i < kept.size(); ++i) kept[i] = static_cast<int>(i);
    int stage_h = model.input_shape[1], stage_w = model.input_shape[2];

    for (const auto& layer : model.layers) {
        if (const auto* cv = std::get_if<ConvLayerT<T>>(&layer)) {
            std::vector<int> kept_out;
            for (int f = 0; f < cv->out_channels(); ++f)
                if (cv->filters[static_cast<size_t>(f)].state != FilterState::Pruned)
                    kept_out.push_back(f);

            ConvLayerT<T> packed(static_cast<int>(kept_out.size()), static_cast<int>(kept.size()),
                                 cv->kernel(), cv->stride, cv->padding);
            const int k2 = cv->kernel() * cv->kernel();
            for (size_t fo = 0; fo < kept_out.size(); ++fo) {
                for (size_t ci = 0; ci < kept.size(); ++ci) {
                    const T* src = cv->weights.data.data() +
                                   (static_cast<size_t>(kept_out[fo]) * cv->in_channels() +
                                    static_cast<size_t>(kept[ci])) * k2;
                    T* dst = packed.weights.data.data() + (fo * kept.size() + ci) * k2;
                    std::copy_n(src, k2, dst);
                }
                packed.bias[fo] = cv->bias[static_cast<size_t>(kept_out[fo])];
                packed.filters[fo] = cv->filters[static_cast<size_t>(kept_out[fo])];
            }
            out.layers.push_back(std::move(packed));
            kept = kept_out;
            stage_h = conv_out_dim(stage_h, cv->kernel(), cv->stride, cv->padding);
            stage_w = conv_out_dim(stage_w, cv->kernel(), cv->stride, cv->padding);
        } else if (std::holds_alternative<ReluLayer>(layer)) {
            out.layers.push_back(ReluLayer{});
        } else if (std::holds_alternative<MaxPoolLayer>(layer)) {
            out.layers.push_back(MaxPoolLayer{});
            stage_h /= 2;
            stage_w /= 2;
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            out.layers.push_back(FlattenLayer{});
        } else {
            const auto& dn = std::get<DenseLayerT<T>>(layer);
            const int full_in = dn.in_dim();
            const int hw = stage_h * stage_w;
            const bool follows_flatten =
                !out.layers.empty() && std::holds_alternative<FlattenLayer>(out.layers.back());
            if (follows_flatten && static_cast<int>(kept.size()) * hw != full_in) {
                // prune the dense columns of removed channels
                DenseLayerT<T> packed(dn.out_dim(), static_cast<int>(kept.size()) * hw);
                for (int o = 0; o < dn.out_dim(); ++o) {
                    for (size_t ci = 0; ci < kept.size(); ++ci) {
                        const T* src = dn.weights.data.data() +
                                       static_cast<size_t>(o) * full_in +
                                       static_cast<size_t>(kept[ci]) * hw;
                        T* dst = packed.weights.data.data() +
                                 (static_cast<size_t>(o) * kept.size() + ci) * hw;
                        std::copy_n(src, hw, dst);
                    }
                    packed.bias[static_cast<size_t>(o)] = dn.bias[static_cast<size_t>(o)];
                }
                out.layers.push_back(std::move(packed));
            } else {
                out.layers.push_back(dn);
            }
        }
    }

    try {
        validate_model(out); // shape bookkeeping must hold
    } catch (const std::exception& e) {
        throw RunError(std::string("compact_model: internal consistency error: ") + e.what());
    }

    result.stats.params_after = parameter_count(out);
    result.stats.macs_after = mac_count(out);
    return result;
}

} // namespace faprune
