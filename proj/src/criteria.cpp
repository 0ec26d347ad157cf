#include "faprune/criteria.hpp"

namespace faprune {

const char* to_string(Criterion c) {
    switch (c) {
    case Criterion::L1: return "l1";
    case Criterion::L2: return "l2";
    case Criterion::Std: return "std";
    case Criterion::Cosine: return "cosine";
    }
    return "?";
}

Criterion criterion_from_string(const std::string& name) {
    if (name == "l1") return Criterion::L1;
    if (name == "l2") return Criterion::L2;
    if (name == "std") return Criterion::Std;
    if (name == "cosine") return Criterion::Cosine;
    throw ConfigError("unknown criterion '" + name + "' (expected l1, l2, std or cosine)");
}

ImportanceScores normalized_scores(const ImportanceScores& scores,
                                   std::span<const FilterInfo> filters) {
    if (scores.values.empty()) throw std::invalid_argument("normalized_scores: empty scores");
    if (filters.size() != scores.values.size())
        throw std::invalid_argument("normalized_scores: state table size mismatch");
    double sum = 0.0;
    int unpruned = 0;
    for (size_t i = 0; i < filters.size(); ++i) {
        if (filters[i].state != FilterState::Pruned) {
            sum += scores.values[i];
            ++unpruned;
        }
    }
    if (unpruned == 0) throw std::invalid_argument("normalized_scores: no unpruned filters");
    const double mean = sum / unpruned;
    ImportanceScores out = scores;
    for (auto& v : out.values) v = (mean == 0.0) ? 0.0 : v / mean;
    return out;
}

std::vector<FilterRef> select_bottom_k(const std::vector<ImportanceScores>& normalized,
                                       int k,
                                       const std::vector<std::vector<FilterInfo>>& states,
                                       bool exclude_pruned) {
    if (k < 0) throw std::invalid_argument("select_bottom_k: k must be >= 0");
    if (normalized.size() != states.size())
        throw std::invalid_argument("select_bottom_k: score/state layer count mismatch");

    struct Candidate {
        double score;
        FilterRef ref;
        bool pruned;
    };
    std::vector<Candidate> pool;
    std::vector<int> unpruned_per_layer(states.size(), 0);
    for (size_t l = 0; l < states.size(); ++l) {
        if (states[l].size() != normalized[l].values.size())
            throw std::invalid_argument("select_bottom_k: layer " + std::to_string(l) +
                                        " score/state size mismatch");
        for (size_t f = 0; f < states[l].size(); ++f) {
            const bool pruned = states[l][f].state == FilterState::Pruned;
            if (!pruned) ++unpruned_per_layer[l];
            if (pruned && exclude_pruned) continue;
            pool.push_back({normalized[l].values[f],
                            FilterRef{static_cast<int>(l), static_cast<int>(f)}, pruned});
        }
    }

    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.ref < b.ref;
    });

    // Greedy take; an unpruned filter is skipped when taking it would leave
    // its layer without a single surviving filter.
    std::vector<int> taken_unpruned(states.size(), 0);
    std::vector<FilterRef> selected;
    for (const Candidate& c : pool) {
        if (static_cast<int>(selected.size()) >= k) break;
        if (!c.pruned) {
            const int l = c.ref.layer;
            if (taken_unpruned[static_cast<size_t>(l)] + 1 >= unpruned_per_layer[static_cast<size_t>(l)] &&
                unpruned_per_layer[static_cast<size_t>(l)] > 0)
                continue;
            ++taken_unpruned[static_cast<size_t>(l)];
        }
        selected.push_back(c.ref);
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

} // namespace faprune
