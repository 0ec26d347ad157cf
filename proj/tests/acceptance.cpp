// Acceptance suite: one criterion per check, one pass/fail line each,
// nonzero exit when anything fails. Everything runs on the serial
// deterministic path. The CLI binary path for the end-to-end determinism
// check comes from --cli (defaults to ../tools/faprune relative to cwd).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "faprune/checkpoint.hpp"
#include "faprune/config.hpp"
#include "faprune/io.hpp"
#include "faprune/reports.hpp"
#include "faprune/scheduler.hpp"

#include "test_util.hpp"

using namespace faprune;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli_path = "../tools/faprune";
const fs::path kScratch = "acceptance_scratch";

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string scratch(const std::string& name) {
    fs::create_directories(kScratch);
    return (kScratch / name).string();
}

// ---------------------------------------------------------------- shared

std::vector<ArchLayer> desk_arch() {
    return {{"conv", 8, 3, 1, 1, 0},  {"relu", 0, 0, 0, 0, 0}, {"maxpool", 0, 0, 0, 0, 0},
            {"conv", 16, 3, 1, 1, 0}, {"relu", 0, 0, 0, 0, 0}, {"maxpool", 0, 0, 0, 0, 0},
            {"flatten", 0, 0, 0, 0, 0}, {"dense", 0, 0, 0, 0, 5}};
}

PruneConfig desk_prune_config() {
    PruneConfig p;
    p.fa = 0.8;
    p.alpha = 0.7;
    p.beta = 0.01;
    p.k0 = 0;
    p.a = 1;
    p.t1 = 0.15;
    p.t2 = -1.0;
    p.t2_rel = 0.05;
    p.criterion = Criterion::L1;
    p.target_prune_fraction = 0.5;
    p.finetune_epochs = 2;
    p.warmup_max_epochs = 60;
    p.warmup_floor = 0.9;
    p.max_rounds = 200;
    return p;
}

struct DeskRun {
    ExperimentLog attn_log, hard_log;
};

DeskRun desk_run(std::uint64_t seed, Criterion criterion, const SplitDataset& split) {
    TrainConfig t;
    t.learning_rate = 0.05;
    t.batch_size = 16;
    t.rng_seed = seed;
    PruneConfig p = desk_prune_config();
    p.criterion = criterion;

    std::mt19937_64 rng(seed);
    Model model = build_model(desk_arch(), {1, 12, 12}, rng);
    DeskRun out;
    out.attn_log = run_attenuation_pruning(model, split.train, split.val, p, t).log;
    out.hard_log = run_hard_pruning(model, split.train, split.val, p, t).log;
    return out;
}

// cached desk runs shared between criteria 5 and 6
std::map<std::pair<std::uint64_t, Criterion>, DeskRun> g_desk_runs;

// ------------------------------------------------------------- criteria

Outcome c1_gradient_correctness() {
    int instances = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 55; ++seed) {
        std::mt19937_64 rng(seed);
        auto inst = testutil::random_instance<double>(rng);
        worst = std::max(worst, testutil::gradcheck_worst_rel(inst.model, inst.input, inst.labels));
        ++instances;
        if (worst > 1e-6) break;
    }
    std::ostringstream os;
    os << instances << " instances, worst rel err " << worst;
    return {worst <= 1e-6 && instances >= 50, os.str()};
}

Outcome c2_mask_oracle_equivalence() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> sdist(0.0, 4.0), adist(0.0, 2.0);
    std::uniform_int_distribution<int> ndist(1, 12), dyadic(0, 16);
    int vectors = 0, boundary_hits = 0;
    for (int trial = 0; trial < 1500 && vectors < 1400; ++trial) {
        std::vector<double> s;
        double alpha, beta;
        bool planted = false;
        if (trial % 3 == 0) {
            s.resize(8);
            double sum = 0;
            for (int i = 0; i < 7; ++i) {
                s[static_cast<size_t>(i)] = dyadic(rng) / 4.0;
                sum += s[static_cast<size_t>(i)];
            }
            if (sum > 16.0) continue;
            s[7] = 16.0 - sum; // mean exactly 2
            alpha = s[static_cast<size_t>(trial % 8)] / 2.0;
            beta = s[static_cast<size_t>((trial + 3) % 8)] / 4.0;
            if (beta > alpha) std::swap(beta, alpha);
            planted = true;
        } else {
            s.resize(static_cast<size_t>(ndist(rng)));
            for (auto& v : s) v = sdist(rng);
            alpha = adist(rng);
            beta = 0.25 * adist(rng);
            if (beta > alpha) std::swap(beta, alpha);
        }

        double mean = 0;
        for (double v : s) mean += v;
        mean /= static_cast<double>(s.size());

        const LayerMask hard = compute_mask_hard(s, alpha);
        const LayerMask att = compute_mask_attenuate(s, alpha, beta, 0.8);
        for (size_t i = 0; i < s.size(); ++i) {
            const double expect_hard = s[i] < alpha * mean ? 0.0 : 1.0;
            double expect_att = 1.0;
            if (s[i] < beta * mean)
                expect_att = 0.0;
            else if (s[i] < alpha * mean)
                expect_att = 0.8;
            if (hard[i] != expect_hard || att[i] != expect_att) {
                std::ostringstream os;
                os << "mismatch at trial " << trial << " index " << i;
                return {false, os.str()};
            }
            if (planted && (s[i] == alpha * mean || s[i] == beta * mean)) ++boundary_hits;
        }
        ++vectors;
    }
    std::ostringstream os;
    os << vectors << " vectors (" << boundary_hits << " exact-boundary scores), all matched";
    return {vectors >= 1000 && boundary_hits > 0, os.str()};
}

Outcome c3_attenuation_scaling_law() {
    std::mt19937_64 rng(777);
    const double fa = 0.8;
    int cases = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 24; ++trial) {
        std::uniform_int_distribution<int> fdist(2, 6), cdist(1, 3);
        const int f = fdist(rng), c = cdist(rng);
        ModelD model;
        model.input_shape = {c, 7, 7};
        model.layers.push_back(testutil::random_conv<double>(f, c, 3, 1, 1, rng));
        TensorD input = testutil::random_tensor<double>({2, c, 7, 7}, rng);
        TensorD base = model_forward(model, input).output();

        const int target = trial % f;
        apply_attenuation(model, {{0, target}}, fa);
        TensorD out = model_forward(model, input).output();

        for (int n = 0; n < 2; ++n)
            for (int ch = 0; ch < f; ++ch)
                for (int h = 0; h < out.dim(2); ++h)
                    for (int w = 0; w < out.dim(3); ++w) {
                        if (ch == target) {
                            const double err =
                                std::abs(out.at(n, ch, h, w) - fa * base.at(n, ch, h, w));
                            worst = std::max(worst, err);
                        } else if (out.at(n, ch, h, w) != base.at(n, ch, h, w)) {
                            return {false, "non-selected channel changed bits"};
                        }
                    }
        ++cases;
    }
    std::ostringstream os;
    os << cases << " models, worst abs deviation from exact 0.8x: " << worst;
    return {cases >= 20 && worst <= 1e-9, os.str()};
}

Outcome c4_compaction_equivalence() {
    std::mt19937_64 rng(888);
    int models = 0, probes = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 22; ++trial) {
        Model model;
        model.input_shape = {1, 10, 10};
        model.layers.push_back(testutil::random_conv<float>(5, 1, 3, 1, 1, rng));
        model.layers.push_back(ReluLayer{});
        model.layers.push_back(MaxPoolLayer{});
        model.layers.push_back(testutil::random_conv<float>(6, 5, 3, 1, 0, rng));
        model.layers.push_back(ReluLayer{});
        model.layers.push_back(FlattenLayer{});
        DenseLayerT<float> dense(4, 6 * 3 * 3);
        std::uniform_real_distribution<double> dist(-0.3, 0.3);
        for (auto& v : dense.weights.data) v = static_cast<float>(dist(rng));
        model.layers.push_back(std::move(dense));

        std::uniform_int_distribution<int> coin(0, 2);
        int pruned_count = 0;
        for (int l = 0; l < 2; ++l) {
            auto& conv = model.conv(l);
            for (int f = 0; f < conv.out_channels() && conv.active_filter_count() > 1; ++f)
                if (coin(rng) == 0) {
                    std::fill_n(conv.filter_weights(f), conv.weights_per_filter(), 0.0f);
                    conv.bias[static_cast<size_t>(f)] = 0.0f;
                    conv.filters[static_cast<size_t>(f)].state = FilterState::Pruned;
                    ++pruned_count;
                }
        }

        auto result = compact_model(model);
        if (result.stats.filters_removed != pruned_count)
            return {false, "filter accounting mismatch"};
        if (result.stats.params_after != parameter_count(result.model))
            return {false, "parameter accounting mismatch"};

        for (int i = 0; i < 100; ++i) {
            Tensor probe = testutil::random_tensor<float>({1, 1, 10, 10}, rng);
            Tensor a = model_forward(model, probe).output();
            Tensor b = model_forward(result.model, probe).output();
            int am = 0, bm = 0;
            for (int j = 1; j < a.dim(1); ++j) {
                if (a.at(0, j) > a.at(0, am)) am = j;
                if (b.at(0, j) > b.at(0, bm)) bm = j;
            }
            if (am != bm) return {false, "argmax disagreement"};
            for (int j = 0; j < a.size(); ++j)
                worst = std::max(worst, static_cast<double>(std::abs(
                                            a.data[static_cast<size_t>(j)] -
                                            b.data[static_cast<size_t>(j)])));
            ++probes;
        }
        ++models;
    }
    std::ostringstream os;
    os << models << " models x100 probes, worst |masked-compacted| " << worst;
    return {models >= 20 && worst <= 1e-5, os.str()};
}

Outcome c5_desk_scale_comparison() {
    Dataset full = gen_synthetic(5, 100, 12, 7, 0.7);
    const SplitDataset split = split_dataset(full);
    const std::vector<std::uint64_t> seeds{101, 102, 103, 104, 105};

    std::ostringstream os;
    bool pass = true;
    for (Criterion crit : {Criterion::L1, Criterion::Std}) {
        double attn_sum = 0.0, hard_sum = 0.0;
        int attn_reached = 0, hard_reached = 0;
        for (std::uint64_t seed : seeds) {
            DeskRun run = desk_run(seed, crit, split);
            attn_sum += run.attn_log.summary.final_accuracy;
            hard_sum += run.hard_log.summary.final_accuracy;
            if (run.attn_log.summary.stop_reason == "target") ++attn_reached;
            if (run.hard_log.summary.stop_reason == "target") ++hard_reached;
            g_desk_runs[{seed, crit}] = std::move(run);
        }
        const double attn_mean = attn_sum / seeds.size();
        const double hard_mean = hard_sum / seeds.size();
        const bool ok = attn_mean >= hard_mean - 0.005;
        pass = pass && ok;
        os << to_string(crit) << ": attn " << attn_mean << " vs hard " << hard_mean << " (target "
           << attn_reached << "+" << hard_reached << "/10 reached); ";
    }
    return {pass, os.str()};
}

Outcome c5_runtime_guard(double seconds) {
    std::ostringstream os;
    os << "desk comparison took " << seconds << " s (< 600 s required)";
    return {seconds < 600.0, os.str()};
}

Outcome c6_recovery_existence() {
    int survivors_attenuated = 0;
    bool histogram_has_row = false;
    for (std::uint64_t seed : {101, 102, 103, 104, 105}) {
        const auto it = g_desk_runs.find({seed, Criterion::L1});
        if (it == g_desk_runs.end()) return {false, "desk runs unavailable"};
        const ExperimentLog& log = it->second.attn_log;
        int here = 0;
        for (const FilterRow& row : log.summary.final_filters)
            if (row.state != FilterState::Pruned && row.attenuation_count >= 1) ++here;
        survivors_attenuated += here;
        if (here > 0 && !histogram_has_row) {
            const std::string dir = scratch("c6_reports_s" + std::to_string(seed));
            emit_reports({log}, dir);
            std::ifstream in(dir + "/attenuation_histogram.csv");
            std::string line;
            std::getline(in, line); // header
            while (std::getline(in, line))
                if (!line.empty()) histogram_has_row = true;
        }
    }
    std::ostringstream os;
    os << survivors_attenuated << " surviving filters with attenuation_count >= 1 across 5 seeds"
       << (histogram_has_row ? "; histogram row present" : "; histogram row MISSING");
    return {survivors_attenuated >= 1 && histogram_has_row, os.str()};
}

Outcome c7_rollback_path() {
    Dataset full = gen_synthetic(5, 60, 12, 7, 0.85);
    const SplitDataset split = split_dataset(full);
    TrainConfig t;
    t.learning_rate = 0.05;
    t.batch_size = 16;
    t.rng_seed = 31337;
    PruneConfig p = desk_prune_config();
    p.t1 = 0.0;
    p.a = 24;
    p.t2 = 10.0;

    std::mt19937_64 rng(t.rng_seed);
    Model model = build_model(desk_arch(), {1, 12, 12}, rng);

    std::map<int, Model> before_prune;
    Model at_rollback;
    int rollback_round = -1;
    SchedulerHooks hooks;
    hooks.before_prune = [&](const Model& m, int round) { before_prune[round] = m; };
    hooks.after_rollback = [&](const Model& m, int round) {
        at_rollback = m;
        rollback_round = round;
    };

    const auto result = run_attenuation_pruning(model, split.train, split.val, p, t, hooks);
    if (result.log.summary.stop_reason != "rollback")
        return {false, "run stopped with '" + result.log.summary.stop_reason +
                           "' instead of rollback"};
    const RoundRecord& last = result.log.rounds.back();
    if (last.pruned.empty() || last.rolled_back != last.pruned)
        return {false, "recovered set does not equal the last pruned set"};

    const Model& before = before_prune.at(rollback_round);
    for (const FilterRef& r : last.rolled_back) {
        const auto& was = before.conv(r.layer);
        const auto& now = at_rollback.conv(r.layer);
        for (int i = 0; i < was.weights_per_filter(); ++i)
            if (was.filter_weights(r.filter)[i] != now.filter_weights(r.filter)[i])
                return {false, "restored weights differ from the pre-prune snapshot"};
        if (was.bias[static_cast<size_t>(r.filter)] != now.bias[static_cast<size_t>(r.filter)])
            return {false, "restored bias differs from the pre-prune snapshot"};
    }
    std::ostringstream os;
    os << "rollback at round " << rollback_round << " restored " << last.rolled_back.size()
       << " filters bit-identically and terminated";
    return {true, os.str()};
}

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t n = a.size();
    auto ranks = [](const std::vector<double>& v) {
        std::vector<size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::sort(idx.begin(), idx.end(), [&](size_t x, size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    double d2 = 0;
    for (size_t i = 0; i < n; ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    return 1.0 - 6.0 * d2 / (static_cast<double>(n) * (static_cast<double>(n) * n - 1.0));
}

Outcome c8_impact_diagnostic() {
    std::mt19937_64 rng(999);
    int models = 0;
    double rho_sum = 0.0, worst_rel = 0.0;
    for (int trial = 0; trial < 22; ++trial) {
        ModelD model;
        model.input_shape = {1, 8, 8};
        const int f = 5 + trial % 3;
        model.layers.push_back(testutil::random_conv<double>(f, 1, 3, 1, 1, rng));
        model.layers.push_back(ReluLayer{});
        if (trial % 2) model.layers.push_back(MaxPoolLayer{});
        model.layers.push_back(testutil::random_conv<double>(4, f, 3, 1, 0, rng));
        TensorD probe = testutil::random_tensor<double>({3, 1, 8, 8}, rng);

        const std::vector<double> l1 = filter_l1(model.conv(0)).values;
        std::vector<double> impacts;
        for (int i = 0; i < f; ++i) {
            const double impact = next_layer_impact(model, 0, {{0, i}}, probe);

            ModelD ablated = model;
            auto& conv = ablated.conv(0);
            std::fill_n(conv.filter_weights(i), conv.weights_per_filter(), 0.0);
            conv.bias[static_cast<size_t>(i)] = 0.0;
            const size_t next_index = ablated.layers.size() - 1;
            TensorD fullout = model_forward(model, probe).acts[next_index + 1];
            TensorD cutout = model_forward(ablated, probe).acts[next_index + 1];
            double diff = 0.0;
            for (int j = 0; j < fullout.size(); ++j)
                diff += std::abs(fullout.data[static_cast<size_t>(j)] -
                                 cutout.data[static_cast<size_t>(j)]);
            diff /= probe.dim(0);

            const double rel = std::abs(impact - diff) / std::max({1e-12, impact, diff});
            worst_rel = std::max(worst_rel, rel);
            impacts.push_back(impact);
        }
        rho_sum += spearman_rho(l1, impacts);
        ++models;
    }
    const double mean_rho = rho_sum / models;
    std::ostringstream os;
    os << models << " models, mean Spearman(L1, impact) " << mean_rho << ", worst oracle rel err "
       << worst_rel;
    return {models >= 20 && mean_rho > 0.0 && worst_rel <= 1e-6, os.str()};
}

Outcome c9_cli_determinism() {
    if (!fs::exists(g_cli_path)) return {false, "CLI binary not found at " + g_cli_path};

    const std::string cfg_path = scratch("compare_config.json");
    atomic_write_file(cfg_path, std::string(R"({
  "model": [
    {"type": "conv", "filters": 8, "kernel": 3, "padding": 1},
    {"type": "relu"}, {"type": "maxpool"},
    {"type": "conv", "filters": 16, "kernel": 3, "padding": 1},
    {"type": "relu"}, {"type": "maxpool"},
    {"type": "flatten"}, {"type": "dense", "units": 5}
  ],
  "train": {"learning_rate": 0.05, "batch_size": 16, "seed": 2024},
  "prune": {"fa": 0.8, "alpha": 0.7, "beta": 0.01, "k0": 0, "a": 2, "t1": 0.15,
            "t2_rel": 0.05, "criterion": "l1", "target_fraction": 0.4,
            "finetune_epochs": 2, "warmup_max_epochs": 60, "warmup_floor": 0.9,
            "max_rounds": 60},
  "dataset": {"source": "synthetic", "classes": 5, "per_class": 60, "size": 12,
              "seed": 7, "noise": 0.7, "splits": [0.7, 0.15, 0.15]}
})"));

    const std::string dir_a = scratch("compare_a"), dir_b = scratch("compare_b");
    for (const std::string& dir : {dir_a, dir_b}) {
        const std::string cmd = g_cli_path + " compare --config " + cfg_path + " --out " + dir +
                                " > " + dir + ".stdout 2>&1";
        if (std::system(cmd.c_str()) != 0) return {false, "compare run failed: " + cmd};
    }

    const char* files[] = {"log_attenuation.jsonl", "log_hard.jsonl",
                           "model_attenuation.ckpt", "model_hard.ckpt",
                           "accuracy_vs_pruned.csv", "profile.csv",
                           "attenuation_histogram.csv", "scores.csv",
                           "filter_states.csv", "summary.json"};
    for (const char* f : files) {
        const std::string a = read_text_file(dir_a + "/" + f);
        const std::string b = read_text_file(dir_b + "/" + f);
        if (a != b) return {false, std::string("byte difference in ") + f};
        if (a.empty()) return {false, std::string("empty artifact ") + f};
    }
    return {true, "two compare runs produced byte-identical logs, checkpoints and reports"};
}

Outcome c10_format_fidelity() {
    // CIFAR fixture
    std::vector<unsigned char> cifar;
    for (int rec = 0; rec < 2; ++rec) {
        cifar.push_back(static_cast<unsigned char>(3 * rec + 1));
        for (int j = 0; j < 3072; ++j)
            cifar.push_back(static_cast<unsigned char>((j * 11 + rec * 17) % 256));
    }
    const std::string cifar_path = scratch("fixture.bin");
    {
        std::ofstream out(cifar_path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(cifar.data()),
                  static_cast<std::streamsize>(cifar.size()));
    }
    Dataset ds = load_cifar10_binary(cifar_path);
    if (ds.size() != 2 || ds.labels != std::vector<int>{1, 4})
        return {false, "cifar fixture decoded wrong labels"};
    for (int rec = 0; rec < 2; ++rec)
        for (int c = 0; c < 3; ++c)
            for (int h = 0; h < 32; ++h)
                for (int w = 0; w < 32; ++w) {
                    const int j = c * 1024 + h * 32 + w;
                    const float expect = cifar[static_cast<size_t>(rec * 3073 + 1 + j)] / 255.0f;
                    if (ds.images.at(rec, c, h, w) != expect)
                        return {false, "cifar fixture decoded wrong pixel"};
                }
    const std::string cifar_rt = scratch("fixture_rt.bin");
    write_cifar10_binary(ds, cifar_rt);
    if (read_text_file(cifar_rt) != read_text_file(cifar_path))
        return {false, "cifar round-trip not byte-identical"};

    // IDX fixture
    std::vector<unsigned char> img, lab;
    auto push32v = [](std::vector<unsigned char>& v, std::uint32_t x) {
        v.push_back(static_cast<unsigned char>(x >> 24));
        v.push_back(static_cast<unsigned char>(x >> 16));
        v.push_back(static_cast<unsigned char>(x >> 8));
        v.push_back(static_cast<unsigned char>(x));
    };
    push32v(img, 0x00000803);
    push32v(img, 2);
    push32v(img, 3);
    push32v(img, 3);
    for (int j = 0; j < 18; ++j) img.push_back(static_cast<unsigned char>(j * 13 % 256));
    push32v(lab, 0x00000801);
    push32v(lab, 2);
    lab.push_back(2);
    lab.push_back(7);
    const std::string ip = scratch("fixture_img.idx"), lp = scratch("fixture_lab.idx");
    {
        std::ofstream o1(ip, std::ios::binary), o2(lp, std::ios::binary);
        o1.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
        o2.write(reinterpret_cast<const char*>(lab.data()), static_cast<std::streamsize>(lab.size()));
    }
    Dataset idx = load_idx(ip, lp);
    if (idx.size() != 2 || idx.labels != std::vector<int>{2, 7})
        return {false, "idx fixture decoded wrong labels"};
    if (idx.images.at(1, 0, 2, 2) != static_cast<float>(17 * 13 % 256) / 255.0f)
        return {false, "idx fixture decoded wrong pixel"};
    const std::string ip2 = scratch("fixture_img_rt.idx"), lp2 = scratch("fixture_lab_rt.idx");
    write_idx(idx, ip2, lp2);
    if (read_text_file(ip2) != read_text_file(ip) || read_text_file(lp2) != read_text_file(lp))
        return {false, "idx round-trip not byte-identical"};

    return {true, "cifar + idx fixtures decode to known values and round-trip byte-identically"};
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];

    std::error_code ec;
    fs::remove_all(kScratch, ec);

    int failed = 0;
    const auto report = [&](int number, const char* name, const Outcome& out, double secs) {
        std::printf("[%s] %2d %-28s %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", number, name,
                    out.detail.c_str(), secs);
        if (!out.pass) ++failed;
        std::fflush(stdout);
    };

    auto timed = [&](int number, const char* name, const std::function<Outcome()>& fn) {
        const auto t0 = Clock::now();
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        report(number, name, out, seconds_since(t0));
        return out;
    };

    const auto t1 = Clock::now();
    Outcome g = timed(1, "gradient-correctness", c1_gradient_correctness);
    if (seconds_since(t1) >= 30.0) {
        report(1, "gradient-correctness(time)", {false, "exceeded 30 s budget"},
               seconds_since(t1));
    }

    const auto t2 = Clock::now();
    timed(2, "mask-oracle-equivalence", c2_mask_oracle_equivalence);
    if (seconds_since(t2) >= 5.0)
        report(2, "mask-oracle(time)", {false, "exceeded 5 s budget"}, seconds_since(t2));

    timed(3, "attenuation-scaling-law", c3_attenuation_scaling_law);
    timed(4, "compaction-equivalence", c4_compaction_equivalence);

    const auto t5 = Clock::now();
    timed(5, "desk-scale-comparison", c5_desk_scale_comparison);
    {
        Outcome rt = c5_runtime_guard(seconds_since(t5));
        if (!rt.pass) report(5, "desk-scale(time)", rt, seconds_since(t5));
    }

    timed(6, "recovery-existence", c6_recovery_existence);
    timed(7, "rollback-path", c7_rollback_path);
    timed(8, "impact-diagnostic", c8_impact_diagnostic);
    timed(9, "cli-determinism", c9_cli_determinism);
    timed(10, "format-fidelity", c10_format_fidelity);

    if (failed) {
        std::printf("ACCEPTANCE: %d criterion(s) FAILED\n", failed);
        return 1;
    }
    std::printf("ACCEPTANCE: all criteria passed\n");
    return 0;
}
