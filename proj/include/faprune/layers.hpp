#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "faprune/kernels.hpp"
#include "faprune/tensor.hpp"

namespace faprune {

// Per-filter lifecycle. Pruned filters have exactly-zero weights and bias;
// the only way back out of Pruned is a rollback.
enum class FilterState : std::uint8_t { Active = 0, Attenuated = 1, Pruned = 2 };

const char* to_string(FilterState s);

struct FilterInfo {
    FilterState state = FilterState::Active;
    int attenuation_count = 0;
    int recovery_count = 0;

    bool operator==(const FilterInfo&) const = default;
};

template <typename T>
struct ConvLayerT {
    TensorT<T> weights;              // [F_out, C_in, K, K]
    std::vector<T> bias;             // [F_out]
    int stride = 1;
    int padding = 0;
    std::vector<FilterInfo> filters; // one entry per output filter

    ConvLayerT() = default;
    ConvLayerT(int f_out, int c_in, int k, int stride_ = 1, int padding_ = 0)
        : weights({f_out, c_in, k, k}), bias(static_cast<size_t>(f_out), T(0)),
          stride(stride_), padding(padding_), filters(static_cast<size_t>(f_out)) {
        if (k < 1 || f_out < 1 || c_in < 1 || stride_ < 1 || padding_ < 0)
            throw std::invalid_argument("invalid conv layer geometry");
    }

    int out_channels() const { return weights.dim(0); }
    int in_channels() const { return weights.dim(1); }
    int kernel() const { return weights.dim(2); }
    int weights_per_filter() const { return in_channels() * kernel() * kernel(); }

    T* filter_weights(int f) { return weights.data.data() + static_cast<size_t>(f) * weights_per_filter(); }
    const T* filter_weights(int f) const {
        return weights.data.data() + static_cast<size_t>(f) * weights_per_filter();
    }

    int active_filter_count() const {
        int n = 0;
        for (const auto& fi : filters)
            if (fi.state != FilterState::Pruned) ++n;
        return n;
    }
};

template <typename T>
struct DenseLayerT {
    TensorT<T> weights; // [out, in]
    std::vector<T> bias;

    DenseLayerT() = default;
    DenseLayerT(int out_dim, int in_dim)
        : weights({out_dim, in_dim}), bias(static_cast<size_t>(out_dim), T(0)) {
        if (out_dim < 1 || in_dim < 1) throw std::invalid_argument("invalid dense layer geometry");
    }

    int out_dim() const { return weights.dim(0); }
    int in_dim() const { return weights.dim(1); }
};

struct ReluLayer {};
struct MaxPoolLayer {}; // fixed 2x2, stride 2
struct FlattenLayer {};

template <typename T>
using LayerT = std::variant<ConvLayerT<T>, ReluLayer, MaxPoolLayer, FlattenLayer, DenseLayerT<T>>;

enum class Exec { Serial, Parallel };

// ---------------------------------------------------------------- shapes

inline int conv_out_dim(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

// ------------------------------------------------------------- layer ops

template <typename T>
struct ConvGradsT {
    TensorT<T> grad_input;
    TensorT<T> grad_weights;
    std::vector<T> grad_bias;
};

template <typename T>
struct DenseGradsT {
    TensorT<T> grad_input;
    TensorT<T> grad_weights;
    std::vector<T> grad_bias;
};

template <typename T>
ConvDims conv_dims_for(const TensorT<T>& input, const ConvLayerT<T>& layer) {
    require_shape(input, 4, "conv2d input");
    ConvDims d;
    d.n = input.dim(0);
    d.c = input.dim(1);
    d.h = input.dim(2);
    d.w = input.dim(3);
    d.f = layer.out_channels();
    d.k = layer.kernel();
    d.stride = layer.stride;
    d.pad = layer.padding;
    if (d.c != layer.in_channels())
        throw std::invalid_argument("conv2d: input has " + std::to_string(d.c) +
                                    " channels but layer expects " +
                                    std::to_string(layer.in_channels()));
    d.ho = conv_out_dim(d.h, d.k, d.stride, d.pad);
    d.wo = conv_out_dim(d.w, d.k, d.stride, d.pad);
    if (d.ho < 1 || d.wo < 1)
        throw std::invalid_argument("conv2d: input " + input.shape_string() +
                                    " too small for kernel " + std::to_string(d.k) +
                                    " stride " + std::to_string(d.stride) + " pad " +
                                    std::to_string(d.pad));
    return d;
}

template <typename T>
TensorT<T> conv2d_forward(const TensorT<T>& input, const ConvLayerT<T>& layer,
                          Exec exec = Exec::Serial) {
    const ConvDims d = conv_dims_for(input, layer);
    TensorT<T> out({d.n, d.f, d.ho, d.wo});
    if (exec == Exec::Parallel)
        kpar::conv2d_forward(input.data.data(), layer.weights.data.data(), layer.bias.data(),
                             out.data.data(), d);
    else
        kser::conv2d_forward(input.data.data(), layer.weights.data.data(), layer.bias.data(),
                             out.data.data(), d);
    return out;
}

template <typename T>
ConvGradsT<T> conv2d_backward(const TensorT<T>& input, const ConvLayerT<T>& layer,
                              const TensorT<T>& grad_output, Exec exec = Exec::Serial) {
    const ConvDims d = conv_dims_for(input, layer);
    if (grad_output.shape != std::vector<int>{d.n, d.f, d.ho, d.wo})
        throw std::invalid_argument("conv2d_backward: grad_output shape " +
                                    grad_output.shape_string() + " does not match output");
    ConvGradsT<T> g;
    g.grad_input = TensorT<T>(input.shape);
    g.grad_weights = TensorT<T>(layer.weights.shape);
    g.grad_bias.assign(layer.bias.size(), T(0));
    if (exec == Exec::Parallel)
        kpar::conv2d_backward(input.data.data(), layer.weights.data.data(),
                              grad_output.data.data(), g.grad_input.data.data(),
                              g.grad_weights.data.data(), g.grad_bias.data(), d);
    else
        kser::conv2d_backward(input.data.data(), layer.weights.data.data(),
                              grad_output.data.data(), g.grad_input.data.data(),
                              g.grad_weights.data.data(), g.grad_bias.data(), d);
    return g;
}

template <typename T>
TensorT<T> relu_forward(const TensorT<T>& input, Exec exec = Exec::Serial) {
    TensorT<T> out(input.shape);
    if (exec == Exec::Parallel)
        kpar::relu_forward(input.data.data(), out.data.data(), input.size());
    else
        kser::relu_forward(input.data.data(), out.data.data(), input.size());
    return out;
}

template <typename T>
TensorT<T> relu_backward(const TensorT<T>& input, const TensorT<T>& grad_output,
                         Exec exec = Exec::Serial) {
    if (!input.same_shape(grad_output))
        throw std::invalid_argument("relu_backward: shape mismatch");
    TensorT<T> gin(input.shape);
    if (exec == Exec::Parallel)
        kpar::relu_backward(input.data.data(), grad_output.data.data(), gin.data.data(),
                            input.size());
    else
        kser::relu_backward(input.data.data(), grad_output.data.data(), gin.data.data(),
                            input.size());
    return gin;
}

template <typename T>
TensorT<T> maxpool_forward(const TensorT<T>& input, Exec exec = Exec::Serial) {
    require_shape(input, 4, "maxpool input");
    const int n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
    if (h < 2 || w < 2) throw std::invalid_argument("maxpool: spatial dims below 2x2");
    TensorT<T> out({n, c, h / 2, w / 2});
    if (exec == Exec::Parallel)
        kpar::maxpool2_forward(input.data.data(), out.data.data(), n, c, h, w);
    else
        kser::maxpool2_forward(input.data.data(), out.data.data(), n, c, h, w);
    return out;
}

template <typename T>
TensorT<T> maxpool_backward(const TensorT<T>& input, const TensorT<T>& grad_output,
                            Exec exec = Exec::Serial) {
    require_shape(input, 4, "maxpool input");
    const int n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
    if (grad_output.shape != std::vector<int>{n, c, h / 2, w / 2})
        throw std::invalid_argument("maxpool_backward: grad_output shape mismatch");
    TensorT<T> gin(input.shape);
    if (exec == Exec::Parallel)
        kpar::maxpool2_backward(input.data.data(), grad_output.data.data(), gin.data.data(), n,
                                c, h, w);
    else
        kser::maxpool2_backward(input.data.data(), grad_output.data.data(), gin.data.data(), n,
                                c, h, w);
    return gin;
}

template <typename T>
TensorT<T> flatten_forward(const TensorT<T>& input) {
    require_shape(input, 4, "flatten input");
    TensorT<T> out({input.dim(0), input.dim(1) * input.dim(2) * input.dim(3)});
    out.data = input.data;
    return out;
}

template <typename T>
TensorT<T> flatten_backward(const TensorT<T>& input, const TensorT<T>& grad_output) {
    if (grad_output.size() != input.size())
        throw std::invalid_argument("flatten_backward: size mismatch");
    TensorT<T> gin(input.shape);
    gin.data = grad_output.data;
    return gin;
}

template <typename T>
TensorT<T> dense_forward(const TensorT<T>& input, const DenseLayerT<T>& layer,
                         Exec exec = Exec::Serial) {
    require_shape(input, 2, "dense input");
    if (input.dim(1) != layer.in_dim())
        throw std::invalid_argument("dense: input width " + std::to_string(input.dim(1)) +
                                    " != layer in_dim " + std::to_string(layer.in_dim()));
    TensorT<T> out({input.dim(0), layer.out_dim()});
    if (exec == Exec::Parallel)
        kpar::dense_forward(input.data.data(), layer.weights.data.data(), layer.bias.data(),
                            out.data.data(), input.dim(0), layer.in_dim(), layer.out_dim());
    else
        kser::dense_forward(input.data.data(), layer.weights.data.data(), layer.bias.data(),
                            out.data.data(), input.dim(0), layer.in_dim(), layer.out_dim());
    return out;
}

template <typename T>
DenseGradsT<T> dense_backward(const TensorT<T>& input, const DenseLayerT<T>& layer,
                              const TensorT<T>& grad_output, Exec exec = Exec::Serial) {
    require_shape(input, 2, "dense input");
    if (grad_output.shape != std::vector<int>{input.dim(0), layer.out_dim()})
        throw std::invalid_argument("dense_backward: grad_output shape mismatch");
    DenseGradsT<T> g;
    g.grad_input = TensorT<T>(input.shape);
    g.grad_weights = TensorT<T>(layer.weights.shape);
    g.grad_bias.assign(layer.bias.size(), T(0));
    if (exec == Exec::Parallel)
        kpar::dense_backward(input.data.data(), layer.weights.data.data(),
                             grad_output.data.data(), g.grad_input.data.data(),
                             g.grad_weights.data.data(), g.grad_bias.data(), input.dim(0),
                             layer.in_dim(), layer.out_dim());
    else
        kser::dense_backward(input.data.data(), layer.weights.data.data(),
                             grad_output.data.data(), g.grad_input.data.data(),
                             g.grad_weights.data.data(), g.grad_bias.data(), input.dim(0),
                             layer.in_dim(), layer.out_dim());
    return g;
}

} // namespace faprune
