#include "faprune/config.hpp"

#include <json.hpp>

#include "faprune/io.hpp"

namespace faprune {

using json = nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;

    if (!j.contains("model") || !j.at("model").is_array() || j.at("model").empty())
        throw ConfigError("config needs a non-empty 'model' layer array");
    for (const auto& lj : j.at("model")) {
        ArchLayer layer;
        layer.type = get_or<std::string>(lj, "type", "");
        if (layer.type == "conv") {
            layer.filters = get_or<int>(lj, "filters", 0);
            layer.kernel = get_or<int>(lj, "kernel", 3);
            layer.stride = get_or<int>(lj, "stride", 1);
            layer.padding = get_or<int>(lj, "padding", 0);
            if (layer.filters < 1) throw ConfigError("conv layer needs filters >= 1");
            if (layer.kernel < 1) throw ConfigError("conv layer needs kernel >= 1");
        } else if (layer.type == "dense") {
            layer.units = get_or<int>(lj, "units", 0);
            if (layer.units < 1) throw ConfigError("dense layer needs units >= 1");
        } else if (layer.type != "relu" && layer.type != "maxpool" && layer.type != "flatten") {
            throw ConfigError("unknown layer type '" + layer.type + "'");
        }
        cfg.arch.push_back(layer);
    }

    if (j.contains("train")) {
        const json& t = j.at("train");
        cfg.train.learning_rate = get_or<double>(t, "learning_rate", cfg.train.learning_rate);
        cfg.train.batch_size = get_or<int>(t, "batch_size", cfg.train.batch_size);
        cfg.train.epochs = get_or<int>(t, "epochs", cfg.train.epochs);
        cfg.train.rng_seed = get_or<std::uint64_t>(t, "seed", cfg.train.rng_seed);
    }

    if (j.contains("prune")) {
        const json& p = j.at("prune");
        cfg.prune.fa = get_or<double>(p, "fa", cfg.prune.fa);
        cfg.prune.alpha = get_or<double>(p, "alpha", cfg.prune.alpha);
        cfg.prune.beta = get_or<double>(p, "beta", cfg.prune.beta);
        cfg.prune.k0 = get_or<int>(p, "k0", cfg.prune.k0);
        cfg.prune.a = get_or<int>(p, "a", cfg.prune.a);
        cfg.prune.t1 = get_or<double>(p, "t1", cfg.prune.t1);
        cfg.prune.t2 = get_or<double>(p, "t2", cfg.prune.t2);
        cfg.prune.t2_rel = get_or<double>(p, "t2_rel", cfg.prune.t2_rel);
        if (p.contains("criterion"))
            cfg.prune.criterion = criterion_from_string(p.at("criterion").get<std::string>());
        cfg.prune.target_prune_fraction =
            get_or<double>(p, "target_fraction", cfg.prune.target_prune_fraction);
        if (p.contains("mode"))
            cfg.prune.mode = mask_mode_from_string(p.at("mode").get<std::string>());
        cfg.prune.finetune_epochs = get_or<int>(p, "finetune_epochs", cfg.prune.finetune_epochs);
        cfg.prune.warmup_max_epochs =
            get_or<int>(p, "warmup_max_epochs", cfg.prune.warmup_max_epochs);
        cfg.prune.warmup_floor = get_or<double>(p, "warmup_floor", cfg.prune.warmup_floor);
        cfg.prune.max_rounds = get_or<int>(p, "max_rounds", cfg.prune.max_rounds);
    }

    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        cfg.dataset.source = get_or<std::string>(d, "source", cfg.dataset.source);
        cfg.dataset.path = get_or<std::string>(d, "path", cfg.dataset.path);
        cfg.dataset.images = get_or<std::string>(d, "images", cfg.dataset.images);
        cfg.dataset.labels = get_or<std::string>(d, "labels", cfg.dataset.labels);
        cfg.dataset.classes = get_or<int>(d, "classes", cfg.dataset.classes);
        cfg.dataset.per_class = get_or<int>(d, "per_class", cfg.dataset.per_class);
        cfg.dataset.size = get_or<int>(d, "size", cfg.dataset.size);
        cfg.dataset.seed = get_or<std::uint64_t>(d, "seed", cfg.dataset.seed);
        cfg.dataset.noise = get_or<double>(d, "noise", cfg.dataset.noise);
        if (d.contains("splits")) {
            const auto v = d.at("splits").get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("dataset.splits must have 3 entries");
            cfg.dataset.splits = {v[0], v[1], v[2]};
        }
        if (cfg.dataset.source != "synthetic" && cfg.dataset.source != "cifar10" &&
            cfg.dataset.source != "idx")
            throw ConfigError("unknown dataset source '" + cfg.dataset.source + "'");
    }

    cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);

    cfg.train.validate();
    cfg.prune.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(read_text_file(path));
}

Dataset load_dataset(const DatasetConfig& cfg) {
    Dataset ds;
    if (cfg.source == "synthetic") {
        ds = gen_synthetic(cfg.classes, cfg.per_class, cfg.size, cfg.seed, cfg.noise);
    } else if (cfg.source == "cifar10") {
        if (cfg.path.empty()) throw ConfigError("cifar10 dataset needs 'path'");
        ds = load_cifar10_binary(cfg.path);
    } else if (cfg.source == "idx") {
        if (cfg.images.empty() || cfg.labels.empty())
            throw ConfigError("idx dataset needs 'images' and 'labels'");
        ds = load_idx(cfg.images, cfg.labels);
    } else {
        throw ConfigError("unknown dataset source '" + cfg.source + "'");
    }
    ds.train_fraction = cfg.splits[0];
    ds.val_fraction = cfg.splits[1];
    ds.test_fraction = cfg.splits[2];
    ds.validate();
    return ds;
}

Model build_model(const std::vector<ArchLayer>& arch, std::array<int, 3> input_chw,
                  std::mt19937_64& rng) {
    Model model;
    model.input_shape = input_chw;
    std::vector<int> s{1, input_chw[0], input_chw[1], input_chw[2]};
    for (const ArchLayer& a : arch) {
        if (a.type == "conv") {
            if (s.size() != 4) throw ConfigError("conv layer after flatten/dense");
            model.layers.push_back(ConvLayerT<float>(a.filters, s[1], a.kernel, a.stride, a.padding));
            const int ho = conv_out_dim(s[2], a.kernel, a.stride, a.padding);
            const int wo = conv_out_dim(s[3], a.kernel, a.stride, a.padding);
            if (ho < 1 || wo < 1) throw ConfigError("conv layer output collapses to zero");
            s = {1, a.filters, ho, wo};
        } else if (a.type == "relu") {
            model.layers.push_back(ReluLayer{});
        } else if (a.type == "maxpool") {
            if (s.size() != 4 || s[2] < 2 || s[3] < 2)
                throw ConfigError("maxpool needs a 4-d input of at least 2x2");
            model.layers.push_back(MaxPoolLayer{});
            s = {1, s[1], s[2] / 2, s[3] / 2};
        } else if (a.type == "flatten") {
            if (s.size() != 4) throw ConfigError("flatten after flatten/dense");
            model.layers.push_back(FlattenLayer{});
            s = {1, s[1] * s[2] * s[3]};
        } else if (a.type == "dense") {
            if (s.size() != 2) throw ConfigError("dense layer needs a flattened input");
            model.layers.push_back(DenseLayerT<float>(a.units, s[1]));
            s = {1, a.units};
        }
    }
    validate_model(model);
    init_model_weights(model, rng);
    return model;
}

} // namespace faprune
