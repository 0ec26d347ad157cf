// Command-line front end: train / prune / compare / report / compact.
// Exit codes: 0 ok, 1 usage or config error, 2 data/format error, 3 run failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "faprune/checkpoint.hpp"
#include "faprune/config.hpp"
#include "faprune/io.hpp"
#include "faprune/reports.hpp"
#include "faprune/scheduler.hpp"

using namespace faprune;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string checkpoint;
    std::string criterion;
    std::string method = "attenuation";
    std::string mode;
    double fa = -1.0, a = -1.0, t1 = -1.0, t2 = -1.0, target = -1.0;
    std::int64_t seed = -1;
    bool parallel = false;
    bool verbose = false;
};

void add_override_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "run configuration file (JSON)")->required();
    cmd->add_option("--out", o.out_dir, "output directory override");
    cmd->add_option("--seed", o.seed, "training seed override");
    cmd->add_option("--criterion", o.criterion, "importance criterion: l1, l2, std, cosine");
    cmd->add_option("--fa", o.fa, "attenuation factor override");
    cmd->add_option("--a", o.a, "per-round k increment override");
    cmd->add_option("--t1", o.t1, "permitted accuracy drop override");
    cmd->add_option("--t2", o.t2, "absolute near-zero prune threshold override");
    cmd->add_option("--target", o.target, "target prune fraction override");
    cmd->add_option("--mode", o.mode, "mask mode: weight or gradient");
    cmd->add_flag("--parallel", o.parallel, "use the OpenMP kernel path");
    cmd->add_flag("--verbose", o.verbose, "print per-round progress");
}

RunConfig effective_config(const CommonOpts& o) {
    RunConfig cfg = load_run_config(o.config_path);
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    if (o.seed >= 0) cfg.train.rng_seed = static_cast<std::uint64_t>(o.seed);
    if (!o.criterion.empty()) cfg.prune.criterion = criterion_from_string(o.criterion);
    if (!o.mode.empty()) cfg.prune.mode = mask_mode_from_string(o.mode);
    if (o.fa >= 0) cfg.prune.fa = o.fa;
    if (o.a >= 0) cfg.prune.a = static_cast<int>(o.a);
    if (o.t1 >= 0) cfg.prune.t1 = o.t1;
    if (o.t2 >= 0) cfg.prune.t2 = o.t2;
    if (o.target >= 0) cfg.prune.target_prune_fraction = o.target;
    cfg.train.validate();
    cfg.prune.validate();
    return cfg;
}

Model starting_model(const RunConfig& cfg, const Dataset& full, const CommonOpts& o) {
    Model model;
    if (!o.checkpoint.empty()) {
        model = load_checkpoint(o.checkpoint);
    } else {
        std::mt19937_64 rng(cfg.train.rng_seed);
        model = build_model(cfg.arch, {full.images.dim(1), full.images.dim(2), full.images.dim(3)},
                            rng);
    }
    model.exec = o.parallel ? Exec::Parallel : Exec::Serial;
    return model;
}

SchedulerHooks make_hooks(const CommonOpts& o) {
    SchedulerHooks hooks;
    if (o.verbose) hooks.info = [](const std::string& line) { std::cout << line << "\n"; };
    return hooks;
}

int cmd_train(const CommonOpts& o) {
    const RunConfig cfg = effective_config(o);
    const Dataset full = load_dataset(cfg.dataset);
    if (full.size() == 0) throw RunError("dataset is empty; nothing to train on");
    const SplitDataset split = split_dataset(full);
    Model model = starting_model(cfg, full, o);

    std::mt19937_64 rng(cfg.train.rng_seed);
    double acc = 0.0;
    int epochs = 0;
    const int budget = std::max(cfg.train.epochs, 1);
    for (int e = 0; e < budget; ++e) {
        const double loss = train_epoch(model, split.train, cfg.train, rng);
        acc = evaluate(model, split.val);
        ++epochs;
        if (o.verbose)
            std::cout << "epoch " << epochs << " loss=" << loss << " val_acc=" << acc << "\n";
        if (acc >= cfg.prune.warmup_floor) break;
    }
    if (acc < cfg.prune.warmup_floor)
        throw RunError("warm-up did not reach the accuracy floor " +
                       std::to_string(cfg.prune.warmup_floor) + " (got " + std::to_string(acc) +
                       " after " + std::to_string(epochs) + " epochs)");

    std::filesystem::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/warmup.ckpt";
    save_checkpoint(model, path);
    std::cout << "warm-up complete: epochs=" << epochs << " val_acc=" << acc << " -> " << path
              << "\n";
    return 0;
}

int cmd_prune(const CommonOpts& o) {
    const RunConfig cfg = effective_config(o);
    if (o.method != "attenuation" && o.method != "hard")
        throw ConfigError("unknown method '" + o.method + "' (expected attenuation or hard)");
    const Dataset full = load_dataset(cfg.dataset);
    if (full.size() == 0) throw RunError("dataset is empty; nothing to prune");
    const SplitDataset split = split_dataset(full);
    Model model = starting_model(cfg, full, o);

    const ScheduleResult result =
        o.method == "hard"
            ? run_hard_pruning(std::move(model), split.train, split.val, cfg.prune, cfg.train,
                               make_hooks(o))
            : run_attenuation_pruning(std::move(model), split.train, split.val, cfg.prune,
                                      cfg.train, make_hooks(o));

    std::filesystem::create_directories(cfg.output_dir);
    write_log(result.log, cfg.output_dir + "/log_" + o.method + ".jsonl");
    save_checkpoint(result.model, cfg.output_dir + "/model_" + o.method + ".ckpt");
    emit_reports({result.log}, cfg.output_dir);
    std::cout << o.method << " run: rounds=" << result.log.summary.rounds
              << " pruned=" << result.log.summary.total_pruned << "/"
              << result.log.header.total_filters
              << " final_acc=" << result.log.summary.final_accuracy << " ("
              << result.log.summary.stop_reason << ")\n";
    return 0;
}

int cmd_compare(const CommonOpts& o) {
    const RunConfig cfg = effective_config(o);
    const Dataset full = load_dataset(cfg.dataset);
    if (full.size() == 0) throw RunError("dataset is empty; nothing to compare");
    const SplitDataset split = split_dataset(full);
    Model base = starting_model(cfg, full, o);

    const ScheduleResult attn = run_attenuation_pruning(base, split.train, split.val, cfg.prune,
                                                        cfg.train, make_hooks(o));
    const ScheduleResult hard =
        run_hard_pruning(base, split.train, split.val, cfg.prune, cfg.train, make_hooks(o));

    std::filesystem::create_directories(cfg.output_dir);
    write_log(attn.log, cfg.output_dir + "/log_attenuation.jsonl");
    write_log(hard.log, cfg.output_dir + "/log_hard.jsonl");
    save_checkpoint(attn.model, cfg.output_dir + "/model_attenuation.ckpt");
    save_checkpoint(hard.model, cfg.output_dir + "/model_hard.ckpt");
    emit_reports({attn.log, hard.log}, cfg.output_dir);
    std::cout << "attenuation: pruned=" << attn.log.summary.total_pruned
              << " acc=" << attn.log.summary.final_accuracy
              << " | hard: pruned=" << hard.log.summary.total_pruned
              << " acc=" << hard.log.summary.final_accuracy << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& log_paths, const std::string& out_dir) {
    std::vector<ExperimentLog> logs;
    for (const std::string& p : log_paths) logs.push_back(read_log(p));
    emit_reports(logs, out_dir);
    std::cout << "reports written to " << out_dir << "\n";
    return 0;
}

int cmd_compact(const std::string& checkpoint, const std::string& out_path) {
    const Model model = load_checkpoint(checkpoint);
    const auto result = compact_model(model);
    save_checkpoint(result.model, out_path);
    std::cout << "compacted " << result.stats.filters_removed
              << " filters: params " << result.stats.params_before << " -> "
              << result.stats.params_after << " (" << fmt_num(100.0 * result.stats.param_reduction())
              << "% reduction), MACs " << result.stats.macs_before << " -> "
              << result.stats.macs_after << " (" << fmt_num(100.0 * result.stats.mac_reduction())
              << "% reduction) -> " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CNN filter pruning via filter attenuation"};
    app.require_subcommand(1);

    CommonOpts train_opts, prune_opts, compare_opts;

    CLI::App* train = app.add_subcommand("train", "train a model to the warm-up floor");
    add_override_flags(train, train_opts);
    train->add_option("--checkpoint", train_opts.checkpoint, "resume from a checkpoint");

    CLI::App* prune = app.add_subcommand("prune", "run the pruning schedule");
    add_override_flags(prune, prune_opts);
    prune->add_option("--checkpoint", prune_opts.checkpoint, "start from a warm-up checkpoint");
    prune->add_option("--method", prune_opts.method, "attenuation (default) or hard");

    CLI::App* compare = app.add_subcommand("compare", "run attenuation vs hard with a shared seed");
    add_override_flags(compare, compare_opts);
    compare->add_option("--checkpoint", compare_opts.checkpoint, "start from a warm-up checkpoint");

    std::vector<std::string> report_logs;
    std::string report_out = "out";
    CLI::App* report = app.add_subcommand("report", "regenerate reports from stored logs");
    report->add_option("--log", report_logs, "experiment log (repeatable)")->required();
    report->add_option("--out", report_out, "output directory");

    std::string compact_in, compact_out = "compacted.ckpt";
    CLI::App* compact = app.add_subcommand("compact", "physically remove pruned filters");
    compact->add_option("--checkpoint", compact_in, "model checkpoint")->required();
    compact->add_option("--out", compact_out, "compacted checkpoint path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train->parsed()) return cmd_train(train_opts);
        if (prune->parsed()) return cmd_prune(prune_opts);
        if (compare->parsed()) return cmd_compare(compare_opts);
        if (report->parsed()) return cmd_report(report_logs, report_out);
        if (compact->parsed()) return cmd_compact(compact_in, compact_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const RunError& e) {
        std::cerr << "run error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
