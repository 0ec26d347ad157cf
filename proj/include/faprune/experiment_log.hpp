#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faprune/criteria.hpp"
#include "faprune/masking.hpp"

namespace faprune {

// Line-delimited structured records: one header, one record per round, one
// summary. Everything the report generators need lives here, so reports are
// pure functions of the log.

struct ScoreRow {
    int layer = 0;
    int filter = 0;
    double raw = 0.0;
    double normalized = 0.0;
};

struct FilterRow {
    int layer = 0;
    int filter = 0;
    FilterState state = FilterState::Active;
    int attenuation_count = 0;
    int recovery_count = 0;
    double l1 = 0.0;
};

struct LogHeader {
    std::string method;    // "attenuation" | "hard"
    std::string criterion; // l1 | l2 | std | cosine
    std::string mask_mode; // weight | gradient
    std::uint64_t seed = 0;
    int warmup_epochs = 0;
    double baseline_accuracy = 0.0;
    std::vector<int> original_filters; // per conv layer
    int total_filters = 0;
    double fa = 0.0, alpha = 0.0, beta = 0.0, t1 = 0.0, target = 0.0;
    int k0 = 0, a = 0, finetune_epochs = 0;
    std::vector<double> t2_per_layer;
};

struct RoundRecord {
    int round = 0;
    int k = 0;
    std::vector<FilterRef> selected;    // bottom-k of this round
    std::vector<FilterRef> pruned;      // newly pruned this round
    std::vector<FilterRef> recovered;   // left the selection, back to Active
    std::vector<FilterRef> rolled_back; // restored by a rollback this round
    double acc_pre = 0.0;  // before the round's fine-tuning
    double acc_gate = 0.0; // after fine-tune + prune, the T1 gate value
    double acc_post = 0.0; // end of round
    int finetune_epochs = 0; // epochs actually trained this round
    int cum_pruned = 0;
    std::vector<int> remaining; // per conv layer, end of round
    std::vector<ScoreRow> scores;
    std::vector<FilterRow> filters; // states at end of round
};

struct RunSummary {
    double final_accuracy = 0.0;
    int rounds = 0;
    int total_pruned = 0;
    std::string stop_reason; // target | rollback | max_rounds | exhausted
    std::vector<FilterRow> final_filters;
    std::int64_t params_before = 0, params_after = 0;
    std::int64_t macs_before = 0, macs_after = 0;
};

struct ExperimentLog {
    LogHeader header;
    std::vector<RoundRecord> rounds;
    RunSummary summary;
};

// JSONL serialization; write is atomic (temp file + rename) and stable, so
// identical logs serialize to identical bytes.
std::string log_to_jsonl(const ExperimentLog& log);
ExperimentLog log_from_jsonl(const std::string& text); // throws FormatError
void write_log(const ExperimentLog& log, const std::string& path);
ExperimentLog read_log(const std::string& path);

} // namespace faprune
