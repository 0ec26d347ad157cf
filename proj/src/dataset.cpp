#include "faprune/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>

#include "faprune/errors.hpp"

namespace faprune {

void Dataset::validate() const {
    if (labels.empty()) return; // degenerate N=0 dataset
    if (images.rank() != 4)
        throw FormatError("dataset images must be [N,C,H,W], got " + images.shape_string());
    if (images.dim(0) != static_cast<int>(labels.size()))
        throw FormatError("dataset image/label count mismatch: " + std::to_string(images.dim(0)) +
                          " vs " + std::to_string(labels.size()));
    if (class_count < 1) throw FormatError("dataset class_count must be >= 1");
    for (int l : labels)
        if (l < 0 || l >= class_count)
            throw FormatError("dataset label " + std::to_string(l) + " outside [0," +
                              std::to_string(class_count) + ")");
    const double total = train_fraction + val_fraction + test_fraction;
    if (train_fraction < 0 || val_fraction < 0 || test_fraction < 0 ||
        std::abs(total - 1.0) > 1e-9)
        throw FormatError("dataset split fractions must be nonnegative and sum to 1");
}

namespace {

Dataset slice_dataset(const Dataset& ds, int begin, int count) {
    Dataset out;
    out.class_count = ds.class_count;
    out.train_fraction = 1.0;
    out.val_fraction = 0.0;
    out.test_fraction = 0.0;
    if (count <= 0) return out;
    const int c = ds.images.dim(1), h = ds.images.dim(2), w = ds.images.dim(3);
    const int stride = c * h * w;
    out.images = Tensor({count, c, h, w});
    std::copy_n(ds.images.data.data() + static_cast<size_t>(begin) * stride,
                static_cast<size_t>(count) * stride, out.images.data.data());
    out.labels.assign(ds.labels.begin() + begin, ds.labels.begin() + begin + count);
    return out;
}

} // namespace

SplitDataset split_dataset(const Dataset& ds) {
    ds.validate();
    const int n = ds.size();
    const int n_train = static_cast<int>(std::llround(n * ds.train_fraction));
    const int n_val = static_cast<int>(std::llround(n * ds.val_fraction));
    const int n_test = n - n_train - n_val;
    if (n_test < 0) throw FormatError("split fractions overflow the dataset");
    SplitDataset s;
    s.train = slice_dataset(ds, 0, n_train);
    s.val = slice_dataset(ds, n_train, n_val);
    s.test = slice_dataset(ds, n_train + n_val, n_test);
    return s;
}

// ----------------------------------------------------------- CIFAR binary

namespace {
constexpr int kCifarDim = 32;
constexpr int kCifarChannels = 3;
constexpr int kCifarRecord = 1 + kCifarChannels * kCifarDim * kCifarDim; // 3073
constexpr int kCifarClasses = 10;

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> bytes(static_cast<size_t>(size));
    if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw FormatError("failed reading file: " + path);
    return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("failed writing file: " + path);
}

} // namespace

Dataset load_cifar10_binary(const std::string& path) {
    const std::vector<unsigned char> bytes = read_file_bytes(path);
    Dataset ds;
    ds.class_count = kCifarClasses;
    if (bytes.empty()) {
        std::cerr << "warning: " << path << " is empty; loaded a 0-record dataset\n";
        return ds;
    }
    if (bytes.size() % kCifarRecord != 0)
        throw FormatError(path + ": size " + std::to_string(bytes.size()) +
                          " is not a multiple of the " + std::to_string(kCifarRecord) +
                          "-byte record");
    const int n = static_cast<int>(bytes.size() / kCifarRecord);
    ds.images = Tensor({n, kCifarChannels, kCifarDim, kCifarDim});
    ds.labels.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const unsigned char* rec = bytes.data() + static_cast<size_t>(i) * kCifarRecord;
        if (rec[0] > 9)
            throw FormatError(path + ": record " + std::to_string(i) + " has label byte " +
                              std::to_string(rec[0]) + " > 9");
        ds.labels[static_cast<size_t>(i)] = rec[0];
        const unsigned char* px = rec + 1;
        float* dst = ds.images.data.data() +
                     static_cast<size_t>(i) * kCifarChannels * kCifarDim * kCifarDim;
        for (int j = 0; j < kCifarChannels * kCifarDim * kCifarDim; ++j)
            dst[j] = static_cast<float>(px[j]) / 255.0f;
    }
    return ds;
}

void write_cifar10_binary(const Dataset& ds, const std::string& path) {
    std::vector<unsigned char> bytes;
    bytes.reserve(static_cast<size_t>(ds.size()) * kCifarRecord);
    for (int i = 0; i < ds.size(); ++i) {
        bytes.push_back(static_cast<unsigned char>(ds.labels[static_cast<size_t>(i)]));
        const float* src = ds.images.data.data() +
                           static_cast<size_t>(i) * kCifarChannels * kCifarDim * kCifarDim;
        for (int j = 0; j < kCifarChannels * kCifarDim * kCifarDim; ++j) {
            const long v = std::lround(static_cast<double>(src[j]) * 255.0);
            bytes.push_back(static_cast<unsigned char>(std::clamp(v, 0L, 255L)));
        }
    }
    write_file_bytes(path, bytes);
}

// ------------------------------------------------------------------- IDX

namespace {
constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

std::uint32_t read_be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
           std::uint32_t(p[3]);
}

void push_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}
} // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const auto ib = read_file_bytes(images_path);
    const auto lb = read_file_bytes(labels_path);
    if (ib.size() < 16) throw FormatError(images_path + ": truncated IDX image header");
    if (lb.size() < 8) throw FormatError(labels_path + ": truncated IDX label header");
    if (read_be32(ib.data()) != kIdxImagesMagic)
        throw FormatError(images_path + ": bad IDX image magic");
    if (read_be32(lb.data()) != kIdxLabelsMagic)
        throw FormatError(labels_path + ": bad IDX label magic");
    const std::uint32_t n = read_be32(ib.data() + 4);
    const std::uint32_t h = read_be32(ib.data() + 8);
    const std::uint32_t w = read_be32(ib.data() + 12);
    const std::uint32_t nl = read_be32(lb.data() + 4);
    if (n != nl)
        throw FormatError("IDX image/label count mismatch: " + std::to_string(n) + " vs " +
                          std::to_string(nl));
    if (ib.size() != 16 + static_cast<size_t>(n) * h * w)
        throw FormatError(images_path + ": truncated IDX image payload");
    if (lb.size() != 8 + static_cast<size_t>(n))
        throw FormatError(labels_path + ": truncated IDX label payload");

    Dataset ds;
    if (n == 0) {
        ds.class_count = 0;
        return ds;
    }
    ds.images = Tensor({static_cast<int>(n), 1, static_cast<int>(h), static_cast<int>(w)});
    ds.labels.resize(n);
    int max_label = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        ds.labels[i] = lb[8 + i];
        max_label = std::max(max_label, static_cast<int>(lb[8 + i]));
    }
    ds.class_count = max_label + 1;
    for (size_t j = 0; j < static_cast<size_t>(n) * h * w; ++j)
        ds.images.data[j] = static_cast<float>(ib[16 + j]) / 255.0f;
    return ds;
}

void write_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path) {
    const int n = ds.size();
    const int h = n ? ds.images.dim(2) : 0;
    const int w = n ? ds.images.dim(3) : 0;
    if (n && ds.images.dim(1) != 1)
        throw FormatError("write_idx supports single-channel images only");

    std::vector<unsigned char> ib;
    push_be32(ib, kIdxImagesMagic);
    push_be32(ib, static_cast<std::uint32_t>(n));
    push_be32(ib, static_cast<std::uint32_t>(h));
    push_be32(ib, static_cast<std::uint32_t>(w));
    for (int j = 0; j < (n ? ds.images.size() : 0); ++j) {
        const long v = std::lround(static_cast<double>(ds.images.data[static_cast<size_t>(j)]) * 255.0);
        ib.push_back(static_cast<unsigned char>(std::clamp(v, 0L, 255L)));
    }
    write_file_bytes(images_path, ib);

    std::vector<unsigned char> lbv;
    push_be32(lbv, kIdxLabelsMagic);
    push_be32(lbv, static_cast<std::uint32_t>(n));
    for (int i = 0; i < n; ++i)
        lbv.push_back(static_cast<unsigned char>(ds.labels[static_cast<size_t>(i)]));
    write_file_bytes(labels_path, lbv);
}

// -------------------------------------------------------------- synthetic

namespace {

// Ten separable grayscale motifs; class k with k >= 10 is rejected upstream.
float pattern_value(int cls, int r, int c, int s) {
    const float bg = 0.15f, fg = 0.85f;
    const int band = std::max(1, s / 8);
    const int mid = s / 2;
    switch (cls) {
    case 0: return std::abs(r - mid) <= band ? fg : bg;                   // horizontal bar
    case 1: return std::abs(c - mid) <= band ? fg : bg;                   // vertical bar
    case 2: return std::abs(r - c) <= band ? fg : bg;                     // diagonal stripe
    case 3: {                                                             // centered disk
        const float dr = r - (s - 1) * 0.5f, dc = c - (s - 1) * 0.5f;
        return dr * dr + dc * dc <= (0.3f * s) * (0.3f * s) ? fg : bg;
    }
    case 4: return std::abs(r + c - (s - 1)) <= band ? fg : bg;           // anti-diagonal
    case 5: return (r < band || c < band || r >= s - band || c >= s - band) ? fg : bg; // frame
    case 6: return (((r / std::max(1, s / 4)) + (c / std::max(1, s / 4))) % 2) ? fg : bg; // checker
    case 7: return (std::abs(r - mid) <= band || std::abs(c - mid) <= band) ? fg : bg;    // cross
    case 8: return r < mid ? fg : bg;                                     // top half
    case 9: return c < mid ? fg : bg;                                     // left half
    default: return bg;
    }
}

} // namespace

Dataset gen_synthetic(int class_count, int n_per_class, int size, std::uint64_t seed,
                      double noise) {
    if (class_count < 2 || class_count > 10)
        throw std::invalid_argument("gen_synthetic: class_count must be in [2,10]");
    if (n_per_class < 1) throw std::invalid_argument("gen_synthetic: n_per_class must be >= 1");
    if (size < 6) throw std::invalid_argument("gen_synthetic: size must be >= 6");
    if (noise < 0) throw std::invalid_argument("gen_synthetic: noise must be >= 0");

    const int n = class_count * n_per_class;
    Dataset ds;
    ds.class_count = class_count;
    ds.images = Tensor({n, 1, size, size});
    ds.labels.resize(static_cast<size_t>(n));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
        const int cls = i % class_count; // interleaved so contiguous splits stay balanced
        ds.labels[static_cast<size_t>(i)] = cls;
        float* img = ds.images.data.data() + static_cast<size_t>(i) * size * size;
        for (int r = 0; r < size; ++r) {
            for (int c = 0; c < size; ++c) {
                const double v = pattern_value(cls, r, c, size) + noise * u(rng);
                img[r * size + c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
        }
    }
    return ds;
}

} // namespace faprune
