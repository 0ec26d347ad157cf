#include "faprune/reports.hpp"

#include <filesystem>
#include <map>

#include <json.hpp>

#include "faprune/io.hpp"

namespace faprune {

using json = nlohmann::ordered_json;

std::string run_label(const LogHeader& header) {
    return header.method + "-" + header.criterion + "-s" + std::to_string(header.seed);
}

void emit_reports(const std::vector<ExperimentLog>& logs, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec && !std::filesystem::is_directory(out_dir))
        throw FormatError("cannot create output directory " + out_dir + ": " + ec.message());

    // accuracy vs cumulative pruned count, one row per round
    std::string acc = "run,round,pruned_filters,accuracy\n";
    for (const ExperimentLog& log : logs) {
        const std::string label = run_label(log.header);
        for (const RoundRecord& r : log.rounds)
            acc += label + "," + std::to_string(r.round) + "," + std::to_string(r.cum_pruned) +
                   "," + fmt_num(r.acc_post) + "\n";
    }
    atomic_write_file(out_dir + "/accuracy_vs_pruned.csv", acc);

    // per-layer pruned-filter profile (final state), one column per run
    std::string profile = "layer,original";
    for (const ExperimentLog& log : logs) profile += "," + run_label(log.header);
    profile += "\n";
    size_t max_layers = 0;
    for (const ExperimentLog& log : logs)
        max_layers = std::max(max_layers, log.header.original_filters.size());
    for (size_t l = 0; l < max_layers; ++l) {
        int original = 0;
        for (const ExperimentLog& log : logs)
            if (l < log.header.original_filters.size())
                original = log.header.original_filters[l];
        profile += "Conv-" + std::to_string(l + 1) + "," + std::to_string(original);
        for (const ExperimentLog& log : logs) {
            int pruned = 0;
            for (const FilterRow& row : log.summary.final_filters)
                if (row.layer == static_cast<int>(l) && row.state == FilterState::Pruned) ++pruned;
            profile += "," + std::to_string(pruned);
        }
        profile += "\n";
    }
    atomic_write_file(out_dir + "/profile.csv", profile);

    // surviving (unpruned) filters bucketed by how often they were attenuated
    std::string hist = "run,attenuation_count,surviving_filters\n";
    for (const ExperimentLog& log : logs) {
        std::map<int, int> bins;
        for (const FilterRow& row : log.summary.final_filters)
            if (row.state != FilterState::Pruned && row.attenuation_count >= 1)
                bins[row.attenuation_count] += 1;
        for (const auto& [count, filters] : bins)
            hist += run_label(log.header) + "," + std::to_string(count) + "," +
                    std::to_string(filters) + "\n";
    }
    atomic_write_file(out_dir + "/attenuation_histogram.csv", hist);

    // per-round criterion scores
    std::string scores = "run,round,layer,filter,criterion,raw_score,normalized_score\n";
    for (const ExperimentLog& log : logs) {
        const std::string label = run_label(log.header);
        for (const RoundRecord& r : log.rounds)
            for (const ScoreRow& s : r.scores)
                scores += label + "," + std::to_string(r.round) + "," + std::to_string(s.layer) +
                          "," + std::to_string(s.filter) + "," + log.header.criterion + "," +
                          fmt_num(s.raw) + "," + fmt_num(s.normalized) + "\n";
    }
    atomic_write_file(out_dir + "/scores.csv", scores);

    // per-round filter lifecycle table
    std::string states = "run,round,layer,filter,state,attenuation_count,recovery_count,l1_norm\n";
    for (const ExperimentLog& log : logs) {
        const std::string label = run_label(log.header);
        for (const RoundRecord& r : log.rounds)
            for (const FilterRow& row : r.filters)
                states += label + "," + std::to_string(r.round) + "," + std::to_string(row.layer) +
                          "," + std::to_string(row.filter) + "," + to_string(row.state) + "," +
                          std::to_string(row.attenuation_count) + "," +
                          std::to_string(row.recovery_count) + "," + fmt_num(row.l1) + "\n";
    }
    atomic_write_file(out_dir + "/filter_states.csv", states);

    // final accounting
    json summary = json::array();
    for (const ExperimentLog& log : logs) {
        json s;
        s["run"] = run_label(log.header);
        s["method"] = log.header.method;
        s["criterion"] = log.header.criterion;
        s["seed"] = log.header.seed;
        s["baseline_accuracy"] = log.header.baseline_accuracy;
        s["final_accuracy"] = log.summary.final_accuracy;
        s["rounds"] = log.summary.rounds;
        s["total_filters"] = log.header.total_filters;
        s["pruned_filters"] = log.summary.total_pruned;
        s["stop_reason"] = log.summary.stop_reason;
        s["params_before"] = log.summary.params_before;
        s["params_after"] = log.summary.params_after;
        const double pr = log.summary.params_before
                              ? 1.0 - static_cast<double>(log.summary.params_after) /
                                          static_cast<double>(log.summary.params_before)
                              : 0.0;
        s["param_reduction"] = pr;
        s["macs_before"] = log.summary.macs_before;
        s["macs_after"] = log.summary.macs_after;
        const double mr = log.summary.macs_before
                              ? 1.0 - static_cast<double>(log.summary.macs_after) /
                                          static_cast<double>(log.summary.macs_before)
                              : 0.0;
        s["mac_reduction"] = mr;
        summary.push_back(std::move(s));
    }
    atomic_write_file(out_dir + "/summary.json", summary.dump(2) + "\n");
}

} // namespace faprune
