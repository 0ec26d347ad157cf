#include "faprune/scheduler.hpp"

#include <cmath>
#include <sstream>

namespace faprune {

namespace {

void ensure_model_finite(const Model& model, const std::string& where) {
    for (const auto& layer : model.layers) {
        if (const auto* cv = std::get_if<ConvLayerT<float>>(&layer)) {
            if (!cv->weights.all_finite())
                throw RunError("non-finite conv weights " + where);
            for (float b : cv->bias)
                if (!std::isfinite(b)) throw RunError("non-finite conv bias " + where);
        } else if (const auto* dn = std::get_if<DenseLayerT<float>>(&layer)) {
            if (!dn->weights.all_finite())
                throw RunError("non-finite dense weights " + where);
        }
    }
}

std::vector<int> remaining_per_layer(const Model& model) {
    std::vector<int> rem;
    for (int i = 0; i < model.conv_layer_count(); ++i)
        rem.push_back(model.conv(i).active_filter_count());
    return rem;
}

std::vector<FilterRow> filter_rows(const Model& model) {
    std::vector<FilterRow> rows;
    for (int l = 0; l < model.conv_layer_count(); ++l) {
        const auto& layer = model.conv(l);
        const ImportanceScores l1 = filter_l1(layer);
        for (int f = 0; f < layer.out_channels(); ++f) {
            const FilterInfo& info = layer.filters[static_cast<size_t>(f)];
            rows.push_back({l, f, info.state, info.attenuation_count, info.recovery_count,
                            l1.values[static_cast<size_t>(f)]});
        }
    }
    return rows;
}

// Gradient masks for fine-tuning: pruned filters are frozen (0); in
// gradient-mask mode the round's selection trains at F_a.
GradMasks build_masks(const Model& model, const PruneConfig& cfg,
                      const std::vector<FilterRef>& selection) {
    GradMasks masks;
    for (int l = 0; l < model.conv_layer_count(); ++l) {
        const auto& layer = model.conv(l);
        std::vector<double> m(static_cast<size_t>(layer.out_channels()), 1.0);
        for (int f = 0; f < layer.out_channels(); ++f)
            if (layer.filters[static_cast<size_t>(f)].state == FilterState::Pruned)
                m[static_cast<size_t>(f)] = 0.0;
        masks.push_back(std::move(m));
    }
    if (cfg.mode == MaskMode::GradientMask) {
        for (const FilterRef& r : selection) {
            auto& m = masks[static_cast<size_t>(r.layer)];
            if (m[static_cast<size_t>(r.filter)] != 0.0) m[static_cast<size_t>(r.filter)] = cfg.fa;
        }
    }
    return masks;
}

PruneSnapshotT<float> merge_snapshots(PruneSnapshotT<float>&& a, PruneSnapshotT<float>&& b) {
    PruneSnapshotT<float> merged;
    merged.valid = true;
    merged.entries = std::move(a.entries);
    for (auto& e : b.entries) merged.entries.push_back(std::move(e));
    return merged;
}

ScheduleResult run_schedule(Model model, const Dataset& train_data, const Dataset& val_data,
                            const PruneConfig& pcfg, const TrainConfig& tcfg,
                            const SchedulerHooks& hooks, bool hard) {
    pcfg.validate();
    tcfg.validate();
    validate_model(model);
    train_data.validate();
    val_data.validate();
    if (train_data.size() == 0 || val_data.size() == 0)
        throw RunError("scheduler: empty train or validation split");

    const int total_filters = model.total_filters();
    const int conv_count = model.conv_layer_count();
    const int target_count =
        static_cast<int>(std::ceil(pcfg.target_prune_fraction * total_filters - 1e-9));
    int max_prunable = 0;
    for (int l = 0; l < conv_count; ++l) max_prunable += model.conv(l).out_channels() - 1;
    if (target_count > max_prunable)
        throw RunError("target_prune_fraction " + std::to_string(pcfg.target_prune_fraction) +
                       " is unreachable: the starvation guard keeps one filter per layer (" +
                       std::to_string(max_prunable) + " of " + std::to_string(total_filters) +
                       " filters prunable)");

    std::mt19937_64 rng(tcfg.rng_seed);
    ExperimentLog log;
    ScheduleResult result;

    // Fig. 3 line 1: warm-up until the accuracy floor (or abort).
    int warmup_epochs = 0;
    double acc = pcfg.warmup_max_epochs == 0 ? evaluate(model, val_data) : 0.0;
    for (int e = 0; e < pcfg.warmup_max_epochs; ++e) {
        train_epoch(model, train_data, tcfg, rng);
        ++warmup_epochs;
        acc = evaluate(model, val_data);
        if (acc >= pcfg.warmup_floor) break;
    }
    if (acc < pcfg.warmup_floor) {
        std::ostringstream os;
        os << "warm-up did not converge: accuracy " << acc << " below floor " << pcfg.warmup_floor
           << " after " << warmup_epochs << " epochs";
        throw RunError(os.str());
    }
    ensure_model_finite(model, "after warm-up");
    const double baseline = acc;

    // T2 per layer: absolute override, or t2_rel * initial mean filter L1.
    std::vector<double> t2_abs;
    for (int l = 0; l < conv_count; ++l) {
        if (pcfg.t2 >= 0.0) {
            t2_abs.push_back(pcfg.t2);
        } else {
            const ImportanceScores l1 = filter_l1(model.conv(l));
            double mean = 0.0;
            for (double v : l1.values) mean += v;
            mean /= l1.count();
            t2_abs.push_back(pcfg.t2_rel * mean);
        }
    }

    log.header.method = hard ? "hard" : "attenuation";
    log.header.criterion = to_string(pcfg.criterion);
    log.header.mask_mode = to_string(pcfg.mode);
    log.header.seed = tcfg.rng_seed;
    log.header.warmup_epochs = warmup_epochs;
    log.header.baseline_accuracy = baseline;
    for (int l = 0; l < conv_count; ++l)
        log.header.original_filters.push_back(model.conv(l).out_channels());
    log.header.total_filters = total_filters;
    log.header.fa = pcfg.fa;
    log.header.alpha = pcfg.alpha;
    log.header.beta = pcfg.beta;
    log.header.t1 = pcfg.t1;
    log.header.target = pcfg.target_prune_fraction;
    log.header.k0 = pcfg.k0;
    log.header.a = pcfg.a;
    log.header.finetune_epochs = pcfg.finetune_epochs;
    log.header.t2_per_layer = t2_abs;

    int k = pcfg.k0;
    std::vector<FilterRef> prev_selection;
    std::string stop_reason;

    for (int round = 1; round <= pcfg.max_rounds && stop_reason.empty(); ++round) {
        k += pcfg.a; // line 3

        RoundRecord rec;
        rec.round = round;
        rec.k = k;

        // line 4: criterion scores, layer-mean normalized
        const auto raw = compute_all_scores(model, pcfg.criterion);
        const auto states = filter_states(model);
        std::vector<ImportanceScores> norm;
        norm.reserve(raw.size());
        for (size_t l = 0; l < raw.size(); ++l)
            norm.push_back(normalized_scores(raw[l], std::span<const FilterInfo>(states[l])));
        for (size_t l = 0; l < raw.size(); ++l)
            for (int f = 0; f < raw[l].count(); ++f)
                rec.scores.push_back({static_cast<int>(l), f, raw[l].values[static_cast<size_t>(f)],
                                      norm[l].values[static_cast<size_t>(f)]});

        // line 5: bottom-k; hard pruning keeps zeroed filters in the pool so
        // the cumulative weak set tracks k
        std::vector<FilterRef> selection =
            select_bottom_k(norm, k, states, /*exclude_pruned=*/!hard);
        rec.selected = selection;

        PruneSnapshotT<float> round_snapshot;
        if (hard) {
            auto outcome = prune_selected(model, selection);
            round_snapshot = std::move(outcome.snapshot);
            rec.pruned = std::move(outcome.pruned);
        } else {
            rec.recovered = record_recovery(model, prev_selection, selection);
            apply_attenuation(model, selection, pcfg.fa,
                              pcfg.mode == MaskMode::WeightAttenuation);
            round_snapshot.valid = false;
        }

        rec.acc_pre = evaluate(model, val_data);

        // line 6: fine-tune with the lifecycle masks
        int ft_epochs = 0;
        GradMasks masks = build_masks(model, pcfg, selection);
        for (int e = 0; e < pcfg.finetune_epochs; ++e, ++ft_epochs)
            train_epoch(model, train_data, tcfg, rng, masks);

        // lines 7-8: sweep near-zero filters into Pruned
        if (hooks.before_prune) hooks.before_prune(model, round);
        auto sweep = prune_zeroed(model, std::span<const double>(t2_abs));
        for (const FilterRef& r : sweep.pruned) rec.pruned.push_back(r);
        round_snapshot = round_snapshot.valid
                             ? merge_snapshots(std::move(round_snapshot), std::move(sweep.snapshot))
                             : std::move(sweep.snapshot);

        // line 9 gate
        rec.acc_gate = evaluate(model, val_data);
        double acc_final = rec.acc_gate;
        if (baseline - rec.acc_gate < pcfg.t1) {
            // line 10: consolidate
            masks = build_masks(model, pcfg, selection);
            for (int e = 0; e < pcfg.finetune_epochs; ++e, ++ft_epochs)
                train_epoch(model, train_data, tcfg, rng, masks);
            acc_final = evaluate(model, val_data);
        }

        // lines 11-14: unacceptable accuracy -> roll back the last prune,
        // fine-tune, terminate
        if (baseline - acc_final > pcfg.t1) {
            restore_snapshot(model, round_snapshot,
                             hard ? FilterState::Active : FilterState::Attenuated);
            for (const auto& entry : round_snapshot.entries) rec.rolled_back.push_back(entry.ref);
            if (hooks.after_rollback) hooks.after_rollback(model, round);
            masks = build_masks(model, pcfg, selection);
            for (int e = 0; e < pcfg.finetune_epochs; ++e, ++ft_epochs)
                train_epoch(model, train_data, tcfg, rng, masks);
            acc_final = evaluate(model, val_data);
            stop_reason = "rollback";
        }

        rec.acc_post = acc_final;
        rec.finetune_epochs = ft_epochs;
        rec.cum_pruned = model.pruned_filters();
        rec.remaining = remaining_per_layer(model);
        rec.filters = filter_rows(model);
        ensure_model_finite(model, "after round " + std::to_string(round));
        log.rounds.push_back(std::move(rec));
        prev_selection = std::move(selection);

        if (hooks.info) {
            std::ostringstream os;
            os << "round " << round << " k=" << k << " pruned=" << model.pruned_filters() << "/"
               << total_filters << " acc=" << acc_final;
            hooks.info(os.str());
        }

        // lines 15-16: complexity target reached
        if (stop_reason.empty() && model.pruned_filters() >= target_count)
            stop_reason = "target";
    }
    if (stop_reason.empty()) stop_reason = "max_rounds";

    log.summary.final_accuracy =
        log.rounds.empty() ? baseline : log.rounds.back().acc_post;
    log.summary.rounds = static_cast<int>(log.rounds.size());
    log.summary.total_pruned = model.pruned_filters();
    log.summary.stop_reason = stop_reason;
    log.summary.final_filters = filter_rows(model);
    const auto compacted = compact_model(model);
    log.summary.params_before = compacted.stats.params_before;
    log.summary.params_after = compacted.stats.params_after;
    log.summary.macs_before = compacted.stats.macs_before;
    log.summary.macs_after = compacted.stats.macs_after;

    result.model = std::move(model);
    result.log = std::move(log);
    return result;
}

} // namespace

ScheduleResult run_attenuation_pruning(Model model, const Dataset& train_data,
                                       const Dataset& val_data, const PruneConfig& config,
                                       const TrainConfig& train_config,
                                       const SchedulerHooks& hooks) {
    return run_schedule(std::move(model), train_data, val_data, config, train_config, hooks,
                        /*hard=*/false);
}

ScheduleResult run_hard_pruning(Model model, const Dataset& train_data, const Dataset& val_data,
                                const PruneConfig& config, const TrainConfig& train_config,
                                const SchedulerHooks& hooks) {
    return run_schedule(std::move(model), train_data, val_data, config, train_config, hooks,
                        /*hard=*/true);
}

const char* to_string(FilterState s) {
    switch (s) {
    case FilterState::Active: return "active";
    case FilterState::Attenuated: return "attenuated";
    case FilterState::Pruned: return "pruned";
    }
    return "?";
}

} // namespace faprune
