#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace faprune {

// Dense n-dimensional array, row-major (last axis fastest).
template <typename T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> data;

    TensorT() = default;

    explicit TensorT(std::vector<int> s, T fill = T(0))
        : shape(std::move(s)), data(checked_volume(shape), fill) {}

    TensorT(std::vector<int> s, std::vector<T> values)
        : shape(std::move(s)), data(std::move(values)) {
        if (static_cast<std::int64_t>(data.size()) != checked_volume(shape)) {
            throw std::invalid_argument("tensor data length " + std::to_string(data.size()) +
                                        " does not match shape volume " +
                                        std::to_string(checked_volume(shape)));
        }
    }

    static std::int64_t checked_volume(const std::vector<int>& s) {
        std::int64_t v = 1;
        for (int d : s) {
            if (d <= 0) throw std::invalid_argument("tensor dimension must be positive, got " + std::to_string(d));
            v *= d;
            if (v > (std::int64_t{1} << 31)) throw std::invalid_argument("tensor too large");
        }
        return v;
    }

    int rank() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape.at(static_cast<size_t>(i)); }
    int size() const { return static_cast<int>(data.size()); }

    // 4-d access [n,c,h,w]
    T& at(int n, int c, int h, int w) {
        return data[static_cast<size_t>(((n * shape[1] + c) * shape[2] + h) * shape[3] + w)];
    }
    const T& at(int n, int c, int h, int w) const {
        return data[static_cast<size_t>(((n * shape[1] + c) * shape[2] + h) * shape[3] + w)];
    }

    // 2-d access [r,c]
    T& at(int r, int c) { return data[static_cast<size_t>(r * shape[1] + c)]; }
    const T& at(int r, int c) const { return data[static_cast<size_t>(r * shape[1] + c)]; }

    bool same_shape(const TensorT& other) const { return shape == other.shape; }

    bool all_finite() const {
        for (const T& v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    std::string shape_string() const {
        std::ostringstream os;
        os << "[";
        for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
        os << "]";
        return os.str();
    }
};

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

template <typename T>
void require_shape(const TensorT<T>& t, int rank, const char* what) {
    if (t.rank() != rank) {
        throw std::invalid_argument(std::string(what) + ": expected rank " + std::to_string(rank) +
                                    " tensor, got shape " + t.shape_string());
    }
}

} // namespace faprune
