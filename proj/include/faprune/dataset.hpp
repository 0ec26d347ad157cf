#pragma once

#include <cstdint>
#include <string>

#include "faprune/tensor.hpp"

namespace faprune {

struct Dataset {
    Tensor images;           // [N, C, H, W], values in [0,1]
    std::vector<int> labels; // length N, values in [0, class_count)
    int class_count = 0;
    double train_fraction = 0.7;
    double val_fraction = 0.15;
    double test_fraction = 0.15;

    int size() const { return labels.empty() ? 0 : images.dim(0); }
    void validate() const;
};

struct SplitDataset {
    Dataset train, val, test;
};

// Contiguous split by the declared fractions; callers generate/class-interleave
// so contiguous slices stay class-balanced.
SplitDataset split_dataset(const Dataset& ds);

// CIFAR-10 binary batch format: records of 1 label byte + 3072 pixel bytes
// (3 channel planes of 32x32, row-major). Pixels scaled by 1/255.
Dataset load_cifar10_binary(const std::string& path);
void write_cifar10_binary(const Dataset& ds, const std::string& path);

// MNIST-style IDX pair: big-endian magic 0x00000803 (images) / 0x00000801
// (labels). Grayscale maps to C=1.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);
void write_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path);

// Deterministic parametric patterns (bars/stripes/blobs per class) plus
// seeded uniform noise; same seed gives a bit-identical dataset.
Dataset gen_synthetic(int class_count, int n_per_class, int size, std::uint64_t seed,
                      double noise = 0.25);

} // namespace faprune
