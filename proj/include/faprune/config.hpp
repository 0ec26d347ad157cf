#pragma once

#include <array>
#include <string>
#include <vector>

#include "faprune/dataset.hpp"
#include "faprune/masking.hpp"
#include "faprune/nn.hpp"

namespace faprune {

struct ArchLayer {
    std::string type; // conv | relu | maxpool | flatten | dense
    int filters = 0;  // conv
    int kernel = 3;   // conv
    int stride = 1;   // conv
    int padding = 0;  // conv
    int units = 0;    // dense
};

struct DatasetConfig {
    std::string source = "synthetic"; // synthetic | cifar10 | idx
    std::string path;                 // cifar10 batch file
    std::string images, labels;       // idx pair
    int classes = 5;
    int per_class = 100;
    int size = 12;
    std::uint64_t seed = 7;
    double noise = 0.25;
    std::array<double, 3> splits{0.7, 0.15, 0.15};
};

struct RunConfig {
    std::vector<ArchLayer> arch;
    TrainConfig train;
    PruneConfig prune;
    DatasetConfig dataset;
    std::string output_dir = "out";
};

RunConfig load_run_config(const std::string& path); // throws ConfigError/FormatError
RunConfig parse_run_config(const std::string& json_text);

Dataset load_dataset(const DatasetConfig& cfg);

// Instantiates the architecture against the dataset's input dims, inferring
// conv in_channels and dense in_dim from the running shape, then initializes
// weights from the generator.
Model build_model(const std::vector<ArchLayer>& arch, std::array<int, 3> input_chw,
                  std::mt19937_64& rng);

} // namespace faprune
