#pragma once

#include <array>
#include <random>

#include "faprune/layers.hpp"

namespace faprune {

// Layered network: conv/relu/pool/flatten/dense stack ending in a dense
// layer whose width is the class count. The softmax-cross-entropy head
// lives in nn.hpp and is applied to the final dense output.
template <typename T>
struct ModelT {
    std::vector<LayerT<T>> layers;
    std::array<int, 3> input_shape{1, 1, 1}; // C,H,W
    Exec exec = Exec::Serial;

    std::vector<int> conv_indices() const {
        std::vector<int> idx;
        for (size_t i = 0; i < layers.size(); ++i)
            if (std::holds_alternative<ConvLayerT<T>>(layers[i])) idx.push_back(static_cast<int>(i));
        return idx;
    }

    ConvLayerT<T>& conv(int ordinal) {
        return std::get<ConvLayerT<T>>(layers[static_cast<size_t>(conv_indices().at(static_cast<size_t>(ordinal)))]);
    }
    const ConvLayerT<T>& conv(int ordinal) const {
        return std::get<ConvLayerT<T>>(layers[static_cast<size_t>(conv_indices().at(static_cast<size_t>(ordinal)))]);
    }

    int conv_layer_count() const { return static_cast<int>(conv_indices().size()); }

    int total_filters() const {
        int n = 0;
        for (int i = 0; i < conv_layer_count(); ++i) n += conv(i).out_channels();
        return n;
    }

    int pruned_filters() const {
        int n = 0;
        for (int i = 0; i < conv_layer_count(); ++i)
            for (const auto& fi : conv(i).filters)
                if (fi.state == FilterState::Pruned) ++n;
        return n;
    }

    int class_count() const {
        for (auto it = layers.rbegin(); it != layers.rend(); ++it)
            if (auto* d = std::get_if<DenseLayerT<T>>(&*it)) return d->out_dim();
        throw std::invalid_argument("model has no dense layer");
    }
};

using Model = ModelT<float>;
using ModelD = ModelT<double>;

// Walks the layer stack symbolically and throws if adjacent shapes do not
// compose. Returns the output shape for a batch of size n.
template <typename T>
std::vector<int> validate_model(const ModelT<T>& model, int n = 1) {
    std::vector<int> s{n, model.input_shape[0], model.input_shape[1], model.input_shape[2]};
    for (size_t i = 0; i < model.layers.size(); ++i) {
        const auto& layer = model.layers[i];
        const std::string at = "layer " + std::to_string(i);
        if (const auto* cv = std::get_if<ConvLayerT<T>>(&layer)) {
            if (s.size() != 4) throw std::invalid_argument(at + ": conv needs a 4-d input");
            if (s[1] != cv->in_channels())
                throw std::invalid_argument(at + ": conv expects " +
                                            std::to_string(cv->in_channels()) + " channels, got " +
                                            std::to_string(s[1]));
            const int ho = conv_out_dim(s[2], cv->kernel(), cv->stride, cv->padding);
            const int wo = conv_out_dim(s[3], cv->kernel(), cv->stride, cv->padding);
            if (ho < 1 || wo < 1) throw std::invalid_argument(at + ": conv output collapses to zero");
            if (static_cast<int>(cv->filters.size()) != cv->out_channels())
                throw std::invalid_argument(at + ": filter state table size mismatch");
            if (static_cast<int>(cv->bias.size()) != cv->out_channels())
                throw std::invalid_argument(at + ": bias size mismatch");
            s = {s[0], cv->out_channels(), ho, wo};
        } else if (std::holds_alternative<ReluLayer>(layer)) {
            // shape preserved
        } else if (std::holds_alternative<MaxPoolLayer>(layer)) {
            if (s.size() != 4 || s[2] < 2 || s[3] < 2)
                throw std::invalid_argument(at + ": maxpool needs a 4-d input of at least 2x2");
            s = {s[0], s[1], s[2] / 2, s[3] / 2};
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            if (s.size() != 4) throw std::invalid_argument(at + ": flatten needs a 4-d input");
            s = {s[0], s[1] * s[2] * s[3]};
        } else if (const auto* dn = std::get_if<DenseLayerT<T>>(&layer)) {
            if (s.size() != 2)
                throw std::invalid_argument(at + ": dense needs a flattened input");
            if (s[1] != dn->in_dim())
                throw std::invalid_argument(at + ": dense expects width " +
                                            std::to_string(dn->in_dim()) + ", got " +
                                            std::to_string(s[1]));
            s = {s[0], dn->out_dim()};
        }
    }
    if (s.size() != 2) throw std::invalid_argument("model must end in a dense layer");
    return s;
}

// acts[0] is the input; acts[i+1] is the output of layer i.
template <typename T>
struct ForwardTraceT {
    std::vector<TensorT<T>> acts;
    const TensorT<T>& output() const { return acts.back(); }
};

template <typename T>
ForwardTraceT<T> model_forward(const ModelT<T>& model, const TensorT<T>& input) {
    ForwardTraceT<T> trace;
    trace.acts.reserve(model.layers.size() + 1);
    trace.acts.push_back(input);
    for (const auto& layer : model.layers) {
        const TensorT<T>& x = trace.acts.back();
        if (const auto* cv = std::get_if<ConvLayerT<T>>(&layer))
            trace.acts.push_back(conv2d_forward(x, *cv, model.exec));
        else if (std::holds_alternative<ReluLayer>(layer))
            trace.acts.push_back(relu_forward(x, model.exec));
        else if (std::holds_alternative<MaxPoolLayer>(layer))
            trace.acts.push_back(maxpool_forward(x, model.exec));
        else if (std::holds_alternative<FlattenLayer>(layer))
            trace.acts.push_back(flatten_forward(x));
        else
            trace.acts.push_back(dense_forward(x, std::get<DenseLayerT<T>>(layer), model.exec));
    }
    return trace;
}

// Gradients for one layer; params empty for layers without parameters.
template <typename T>
struct LayerGradsT {
    TensorT<T> weights;
    std::vector<T> bias;
    bool has_params() const { return !weights.data.empty(); }
};

template <typename T>
struct ModelGradsT {
    std::vector<LayerGradsT<T>> per_layer;
    TensorT<T> grad_input;
};

template <typename T>
ModelGradsT<T> model_backward(const ModelT<T>& model, const ForwardTraceT<T>& trace,
                              const TensorT<T>& grad_output) {
    if (trace.acts.size() != model.layers.size() + 1)
        throw std::invalid_argument("model_backward: trace does not match model");
    ModelGradsT<T> grads;
    grads.per_layer.resize(model.layers.size());
    TensorT<T> g = grad_output;
    for (int i = static_cast<int>(model.layers.size()) - 1; i >= 0; --i) {
        const auto& layer = model.layers[static_cast<size_t>(i)];
        const TensorT<T>& x = trace.acts[static_cast<size_t>(i)];
        if (const auto* cv = std::get_if<ConvLayerT<T>>(&layer)) {
            ConvGradsT<T> cg = conv2d_backward(x, *cv, g, model.exec);
            grads.per_layer[static_cast<size_t>(i)].weights = std::move(cg.grad_weights);
            grads.per_layer[static_cast<size_t>(i)].bias = std::move(cg.grad_bias);
            g = std::move(cg.grad_input);
        } else if (std::holds_alternative<ReluLayer>(layer)) {
            g = relu_backward(x, g, model.exec);
        } else if (std::holds_alternative<MaxPoolLayer>(layer)) {
            g = maxpool_backward(x, g, model.exec);
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            g = flatten_backward(x, g);
        } else {
            const auto& dn = std::get<DenseLayerT<T>>(layer);
            DenseGradsT<T> dg = dense_backward(x, dn, g, model.exec);
            grads.per_layer[static_cast<size_t>(i)].weights = std::move(dg.grad_weights);
            grads.per_layer[static_cast<size_t>(i)].bias = std::move(dg.grad_bias);
            g = std::move(dg.grad_input);
        }
    }
    grads.grad_input = std::move(g);
    return grads;
}

// Glorot-uniform init, deterministic in layer order for a given generator.
template <typename T>
void init_model_weights(ModelT<T>& model, std::mt19937_64& rng) {
    for (auto& layer : model.layers) {
        if (auto* cv = std::get_if<ConvLayerT<T>>(&layer)) {
            const double fan_in = cv->in_channels() * cv->kernel() * cv->kernel();
            const double fan_out = cv->out_channels() * cv->kernel() * cv->kernel();
            const double limit = std::sqrt(6.0 / (fan_in + fan_out));
            std::uniform_real_distribution<double> dist(-limit, limit);
            for (auto& v : cv->weights.data) v = static_cast<T>(dist(rng));
            for (auto& b : cv->bias) b = T(0);
        } else if (auto* dn = std::get_if<DenseLayerT<T>>(&layer)) {
            const double limit = std::sqrt(6.0 / (dn->in_dim() + dn->out_dim()));
            std::uniform_real_distribution<double> dist(-limit, limit);
            for (auto& v : dn->weights.data) v = static_cast<T>(dist(rng));
            for (auto& b : dn->bias) b = T(0);
        }
    }
}

template <typename T>
std::int64_t parameter_count(const ModelT<T>& model) {
    std::int64_t n = 0;
    for (const auto& layer : model.layers) {
        if (const auto* cv = std::get_if<ConvLayerT<T>>(&layer))
            n += cv->weights.size() + static_cast<std::int64_t>(cv->bias.size());
        else if (const auto* dn = std::get_if<DenseLayerT<T>>(&layer))
            n += dn->weights.size() + static_cast<std::int64_t>(dn->bias.size());
    }
    return n;
}

// Multiply-accumulate count of one forward pass for a single input.
template <typename T>
std::int64_t mac_count(const ModelT<T>& model) {
    std::int64_t macs = 0;
    std::vector<int> s{1, model.input_shape[0], model.input_shape[1], model.input_shape[2]};
    for (const auto& layer : model.layers) {
        if (const auto* cv = std::get_if<ConvLayerT<T>>(&layer)) {
            const int ho = conv_out_dim(s[2], cv->kernel(), cv->stride, cv->padding);
            const int wo = conv_out_dim(s[3], cv->kernel(), cv->stride, cv->padding);
            macs += static_cast<std::int64_t>(cv->out_channels()) * cv->in_channels() *
                    cv->kernel() * cv->kernel() * ho * wo;
            s = {1, cv->out_channels(), ho, wo};
        } else if (std::holds_alternative<MaxPoolLayer>(layer)) {
            s = {1, s[1], s[2] / 2, s[3] / 2};
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            s = {1, s[1] * s[2] * s[3]};
        } else if (const auto* dn = std::get_if<DenseLayerT<T>>(&layer)) {
            macs += static_cast<std::int64_t>(dn->out_dim()) * dn->in_dim();
            s = {1, dn->out_dim()};
        }
    }
    return macs;
}

} // namespace faprune
