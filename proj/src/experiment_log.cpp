#include "faprune/experiment_log.hpp"

#include <json.hpp>

#include "faprune/io.hpp"

namespace faprune {

using json = nlohmann::ordered_json;

namespace {

json refs_to_json(const std::vector<FilterRef>& refs) {
    json arr = json::array();
    for (const FilterRef& r : refs) arr.push_back({r.layer, r.filter});
    return arr;
}

std::vector<FilterRef> refs_from_json(const json& arr) {
    std::vector<FilterRef> refs;
    for (const auto& e : arr) refs.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    return refs;
}

json filter_rows_to_json(const std::vector<FilterRow>& rows) {
    json arr = json::array();
    for (const FilterRow& r : rows)
        arr.push_back({{"layer", r.layer},
                       {"filter", r.filter},
                       {"state", to_string(r.state)},
                       {"atten", r.attenuation_count},
                       {"recov", r.recovery_count},
                       {"l1", r.l1}});
    return arr;
}

FilterState state_from_string(const std::string& s) {
    if (s == "active") return FilterState::Active;
    if (s == "attenuated") return FilterState::Attenuated;
    if (s == "pruned") return FilterState::Pruned;
    throw FormatError("unknown filter state '" + s + "' in log");
}

std::vector<FilterRow> filter_rows_from_json(const json& arr) {
    std::vector<FilterRow> rows;
    for (const auto& e : arr)
        rows.push_back({e.at("layer").get<int>(), e.at("filter").get<int>(),
                        state_from_string(e.at("state").get<std::string>()),
                        e.at("atten").get<int>(), e.at("recov").get<int>(),
                        e.at("l1").get<double>()});
    return rows;
}

} // namespace

std::string log_to_jsonl(const ExperimentLog& log) {
    std::string out;

    json h;
    h["type"] = "header";
    h["method"] = log.header.method;
    h["criterion"] = log.header.criterion;
    h["mask_mode"] = log.header.mask_mode;
    h["seed"] = log.header.seed;
    h["warmup_epochs"] = log.header.warmup_epochs;
    h["baseline_accuracy"] = log.header.baseline_accuracy;
    h["original_filters"] = log.header.original_filters;
    h["total_filters"] = log.header.total_filters;
    h["fa"] = log.header.fa;
    h["alpha"] = log.header.alpha;
    h["beta"] = log.header.beta;
    h["t1"] = log.header.t1;
    h["target"] = log.header.target;
    h["k0"] = log.header.k0;
    h["a"] = log.header.a;
    h["finetune_epochs"] = log.header.finetune_epochs;
    h["t2_per_layer"] = log.header.t2_per_layer;
    out += h.dump();
    out += '\n';

    for (const RoundRecord& r : log.rounds) {
        json j;
        j["type"] = "round";
        j["round"] = r.round;
        j["k"] = r.k;
        j["selected"] = refs_to_json(r.selected);
        j["pruned"] = refs_to_json(r.pruned);
        j["recovered"] = refs_to_json(r.recovered);
        j["rolled_back"] = refs_to_json(r.rolled_back);
        j["acc_pre"] = r.acc_pre;
        j["acc_gate"] = r.acc_gate;
        j["acc_post"] = r.acc_post;
        j["finetune_epochs"] = r.finetune_epochs;
        j["cum_pruned"] = r.cum_pruned;
        j["remaining"] = r.remaining;
        json scores = json::array();
        for (const ScoreRow& s : r.scores)
            scores.push_back({{"layer", s.layer},
                              {"filter", s.filter},
                              {"raw", s.raw},
                              {"norm", s.normalized}});
        j["scores"] = scores;
        j["filters"] = filter_rows_to_json(r.filters);
        out += j.dump();
        out += '\n';
    }

    json s;
    s["type"] = "summary";
    s["final_accuracy"] = log.summary.final_accuracy;
    s["rounds"] = log.summary.rounds;
    s["total_pruned"] = log.summary.total_pruned;
    s["stop_reason"] = log.summary.stop_reason;
    s["final_filters"] = filter_rows_to_json(log.summary.final_filters);
    s["params_before"] = log.summary.params_before;
    s["params_after"] = log.summary.params_after;
    s["macs_before"] = log.summary.macs_before;
    s["macs_after"] = log.summary.macs_after;
    out += s.dump();
    out += '\n';
    return out;
}

ExperimentLog log_from_jsonl(const std::string& text) {
    ExperimentLog log;
    bool saw_header = false, saw_summary = false;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(std::string("log parse error: ") + e.what());
        }
        const std::string type = j.value("type", "");
        try {
            if (type == "header") {
                saw_header = true;
                log.header.method = j.at("method").get<std::string>();
                log.header.criterion = j.at("criterion").get<std::string>();
                log.header.mask_mode = j.at("mask_mode").get<std::string>();
                log.header.seed = j.at("seed").get<std::uint64_t>();
                log.header.warmup_epochs = j.at("warmup_epochs").get<int>();
                log.header.baseline_accuracy = j.at("baseline_accuracy").get<double>();
                log.header.original_filters = j.at("original_filters").get<std::vector<int>>();
                log.header.total_filters = j.at("total_filters").get<int>();
                log.header.fa = j.at("fa").get<double>();
                log.header.alpha = j.at("alpha").get<double>();
                log.header.beta = j.at("beta").get<double>();
                log.header.t1 = j.at("t1").get<double>();
                log.header.target = j.at("target").get<double>();
                log.header.k0 = j.at("k0").get<int>();
                log.header.a = j.at("a").get<int>();
                log.header.finetune_epochs = j.at("finetune_epochs").get<int>();
                log.header.t2_per_layer = j.at("t2_per_layer").get<std::vector<double>>();
            } else if (type == "round") {
                RoundRecord r;
                r.round = j.at("round").get<int>();
                r.k = j.at("k").get<int>();
                r.selected = refs_from_json(j.at("selected"));
                r.pruned = refs_from_json(j.at("pruned"));
                r.recovered = refs_from_json(j.at("recovered"));
                r.rolled_back = refs_from_json(j.at("rolled_back"));
                r.acc_pre = j.at("acc_pre").get<double>();
                r.acc_gate = j.at("acc_gate").get<double>();
                r.acc_post = j.at("acc_post").get<double>();
                r.finetune_epochs = j.at("finetune_epochs").get<int>();
                r.cum_pruned = j.at("cum_pruned").get<int>();
                r.remaining = j.at("remaining").get<std::vector<int>>();
                for (const auto& s : j.at("scores"))
                    r.scores.push_back({s.at("layer").get<int>(), s.at("filter").get<int>(),
                                        s.at("raw").get<double>(), s.at("norm").get<double>()});
                r.filters = filter_rows_from_json(j.at("filters"));
                log.rounds.push_back(std::move(r));
            } else if (type == "summary") {
                saw_summary = true;
                log.summary.final_accuracy = j.at("final_accuracy").get<double>();
                log.summary.rounds = j.at("rounds").get<int>();
                log.summary.total_pruned = j.at("total_pruned").get<int>();
                log.summary.stop_reason = j.at("stop_reason").get<std::string>();
                log.summary.final_filters = filter_rows_from_json(j.at("final_filters"));
                log.summary.params_before = j.at("params_before").get<std::int64_t>();
                log.summary.params_after = j.at("params_after").get<std::int64_t>();
                log.summary.macs_before = j.at("macs_before").get<std::int64_t>();
                log.summary.macs_after = j.at("macs_after").get<std::int64_t>();
            } else {
                throw FormatError("log record with unknown type '" + type + "'");
            }
        } catch (const json::exception& e) {
            throw FormatError(std::string("log field error: ") + e.what());
        }
    }
    if (!saw_header || !saw_summary)
        throw FormatError("log is missing its header or summary record");
    return log;
}

void write_log(const ExperimentLog& log, const std::string& path) {
    atomic_write_file(path, log_to_jsonl(log));
}

ExperimentLog read_log(const std::string& path) { return log_from_jsonl(read_text_file(path)); }

} // namespace faprune
