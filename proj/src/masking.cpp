#include "faprune/masking.hpp"

namespace faprune {

const char* to_string(MaskMode m) {
    return m == MaskMode::WeightAttenuation ? "weight" : "gradient";
}

MaskMode mask_mode_from_string(const std::string& name) {
    if (name == "weight") return MaskMode::WeightAttenuation;
    if (name == "gradient") return MaskMode::GradientMask;
    throw ConfigError("unknown mask mode '" + name + "' (expected weight or gradient)");
}

void PruneConfig::validate() const {
    if (!(fa > 0.0 && fa < 1.0)) throw ConfigError("fa must be in (0,1)");
    if (beta < 0.0) throw ConfigError("beta must be >= 0");
    if (!(beta < alpha)) throw ConfigError("beta must be < alpha");
    if (t1 < 0.0) throw ConfigError("t1 must be >= 0");
    if (a < 0) throw ConfigError("a must be >= 0");
    if (k0 < 0) throw ConfigError("k0 must be >= 0");
    if (t2 < 0.0 && t2_rel < 0.0) throw ConfigError("t2 or t2_rel must be >= 0");
    if (!(target_prune_fraction > 0.0 && target_prune_fraction <= 1.0))
        throw ConfigError("target_prune_fraction must be in (0,1]");
    if (finetune_epochs < 0) throw ConfigError("finetune_epochs must be >= 0");
    if (warmup_max_epochs < 0) throw ConfigError("warmup_max_epochs must be >= 0");
    if (!(warmup_floor >= 0.0 && warmup_floor <= 1.0))
        throw ConfigError("warmup_floor must be in [0,1]");
    if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
}

namespace {

double unpruned_mean(std::span<const double> scores, std::span<const FilterInfo> filters) {
    if (scores.empty()) throw std::invalid_argument("mask: empty score vector");
    if (!filters.empty() && filters.size() != scores.size())
        throw std::invalid_argument("mask: state table size mismatch");
    double sum = 0.0;
    int n = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (!filters.empty() && filters[i].state == FilterState::Pruned) continue;
        sum += scores[i];
        ++n;
    }
    if (n == 0) throw std::invalid_argument("mask: no unpruned filters");
    return sum / n;
}

} // namespace

LayerMask compute_mask_hard(std::span<const double> scores, double alpha,
                            std::span<const FilterInfo> filters) {
    const double threshold = alpha * unpruned_mean(scores, filters);
    LayerMask mask(scores.size(), 1.0);
    for (size_t i = 0; i < scores.size(); ++i)
        if (scores[i] < threshold) mask[i] = 0.0;
    return mask;
}

LayerMask compute_mask_attenuate(std::span<const double> scores, double alpha, double beta,
                                 double fa, std::span<const FilterInfo> filters) {
    if (beta > alpha)
        throw ConfigError("compute_mask_attenuate: beta (" + std::to_string(beta) +
                          ") must not exceed alpha (" + std::to_string(alpha) + ")");
    const double mean = unpruned_mean(scores, filters);
    const double prune_at = beta * mean;
    const double attenuate_at = alpha * mean;
    LayerMask mask(scores.size(), 1.0);
    for (size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] < prune_at)
            mask[i] = 0.0;
        else if (scores[i] < attenuate_at)
            mask[i] = fa;
    }
    return mask;
}

} // namespace faprune
