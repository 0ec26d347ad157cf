#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "faprune/nn.hpp"

#include "test_util.hpp"

using namespace faprune;
using testutil::random_conv;
using testutil::random_tensor;

TEST_CASE("tensor shape and data invariants") {
    Tensor t({2, 3});
    CHECK(t.size() == 6);
    CHECK(t.rank() == 2);
    CHECK_THROWS_AS(Tensor({2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Tensor({-1}), std::invalid_argument);
    CHECK_THROWS_AS(Tensor({2, 2}, std::vector<float>{1.0f}), std::invalid_argument);
    t.at(1, 2) = 5.0f;
    CHECK(t.data[5] == 5.0f);
    CHECK(t.all_finite());
    t.at(0, 0) = std::numeric_limits<float>::infinity();
    CHECK_FALSE(t.all_finite());
}

TEST_CASE("conv2d identity kernel reproduces the input") {
    Tensor input({1, 1, 3, 3}, std::vector<float>(9, 1.0f));
    ConvLayerT<float> layer(1, 1, 1);
    layer.weights.data[0] = 1.0f;
    Tensor out = conv2d_forward(input, layer);
    CHECK(out.shape == std::vector<int>{1, 1, 3, 3});
    CHECK(out.data == input.data);
}

TEST_CASE("conv2d all-zero weights give a constant bias plane") {
    std::mt19937_64 rng(7);
    Tensor input = random_tensor<float>({2, 3, 5, 5}, rng);
    ConvLayerT<float> layer(4, 3, 3);
    layer.bias = {0.5f, -1.0f, 2.0f, 0.0f};
    Tensor out = conv2d_forward(input, layer);
    for (int n = 0; n < 2; ++n)
        for (int f = 0; f < 4; ++f)
            for (int h = 0; h < out.dim(2); ++h)
                for (int w = 0; w < out.dim(3); ++w)
                    CHECK(out.at(n, f, h, w) == layer.bias[static_cast<size_t>(f)]);
}

// Independent six-nested-loop reference convolution; written against the
// definition, not the kernel implementation.
static TensorD conv_reference(const TensorD& in, const ConvLayerT<double>& layer) {
    const int n = in.dim(0), c = in.dim(1), h = in.dim(2), w = in.dim(3);
    const int f = layer.out_channels(), k = layer.kernel();
    const int ho = (h + 2 * layer.padding - k) / layer.stride + 1;
    const int wo = (w + 2 * layer.padding - k) / layer.stride + 1;
    TensorD out({n, f, ho, wo});
    for (int i = 0; i < n; ++i)
        for (int o = 0; o < f; ++o)
            for (int y = 0; y < ho; ++y)
                for (int x = 0; x < wo; ++x) {
                    double acc = layer.bias[static_cast<size_t>(o)];
                    for (int ci = 0; ci < c; ++ci)
                        for (int ky = 0; ky < k; ++ky)
                            for (int kx = 0; kx < k; ++kx) {
                                const int iy = y * layer.stride + ky - layer.padding;
                                const int ix = x * layer.stride + kx - layer.padding;
                                if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                                acc += in.at(i, ci, iy, ix) *
                                       layer.weights.at(o, ci, ky, kx);
                            }
                    out.at(i, o, y, x) = acc;
                }
    return out;
}

TEST_CASE("conv2d matches the brute-force reference") {
    std::mt19937_64 rng(11);
    TensorD input = random_tensor<double>({1, 2, 4, 4}, rng);
    ConvLayerT<double> layer = random_conv<double>(3, 2, 3, 1, 0, rng);
    TensorD out = conv2d_forward(input, layer);
    TensorD ref = conv_reference(input, layer);
    CHECK(out.shape == std::vector<int>{1, 3, 2, 2});
    REQUIRE(out.shape == ref.shape);
    for (int i = 0; i < out.size(); ++i)
        CHECK(out.data[static_cast<size_t>(i)] ==
              doctest::Approx(ref.data[static_cast<size_t>(i)]).epsilon(1e-12));

    // strides and padding too
    for (int stride = 1; stride <= 2; ++stride) {
        for (int pad = 0; pad <= 1; ++pad) {
            TensorD in2 = random_tensor<double>({2, 3, 6, 6}, rng);
            ConvLayerT<double> l2 = random_conv<double>(2, 3, 3, stride, pad, rng);
            TensorD a = conv2d_forward(in2, l2);
            TensorD b = conv_reference(in2, l2);
            REQUIRE(a.shape == b.shape);
            for (int i = 0; i < a.size(); ++i)
                CHECK(a.data[static_cast<size_t>(i)] ==
                      doctest::Approx(b.data[static_cast<size_t>(i)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("conv2d rejects mismatched shapes") {
    std::mt19937_64 rng(3);
    Tensor input = random_tensor<float>({1, 2, 4, 4}, rng);
    ConvLayerT<float> layer(3, 3, 3); // expects 3 input channels
    CHECK_THROWS_AS(conv2d_forward(input, layer), std::invalid_argument);
    ConvLayerT<float> big(1, 2, 5); // kernel larger than input
    CHECK_THROWS_AS(conv2d_forward(input, big), std::invalid_argument);
}

TEST_CASE("conv2d_backward zero grad_output gives zero gradients") {
    std::mt19937_64 rng(5);
    Tensor input = random_tensor<float>({1, 2, 4, 4}, rng);
    ConvLayerT<float> layer = random_conv<float>(3, 2, 3, 1, 0, rng);
    Tensor gout({1, 3, 2, 2});
    auto g = conv2d_backward(input, layer, gout);
    for (float v : g.grad_input.data) CHECK(v == 0.0f);
    for (float v : g.grad_weights.data) CHECK(v == 0.0f);
    for (float v : g.grad_bias) CHECK(v == 0.0f);
}

TEST_CASE("conv2d_backward 1x1 kernel reduces to a product-sum") {
    std::mt19937_64 rng(9);
    TensorD input = random_tensor<double>({1, 2, 3, 3}, rng);
    ConvLayerT<double> layer = random_conv<double>(2, 2, 1, 1, 0, rng);
    TensorD gout = random_tensor<double>({1, 2, 3, 3}, rng);
    auto g = conv2d_backward(input, layer, gout);
    for (int f = 0; f < 2; ++f)
        for (int c = 0; c < 2; ++c) {
            double expect = 0.0;
            for (int h = 0; h < 3; ++h)
                for (int w = 0; w < 3; ++w) expect += input.at(0, c, h, w) * gout.at(0, f, h, w);
            CHECK(g.grad_weights.at(f, c, 0, 0) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("relu forward/backward definitions") {
    Tensor x({1, 3}, std::vector<float>{-1.0f, 0.0f, 2.0f});
    Tensor y = relu_forward(x);
    CHECK(y.data == std::vector<float>{0.0f, 0.0f, 2.0f});
    Tensor g({1, 3}, std::vector<float>{1.0f, 1.0f, 1.0f});
    Tensor gin = relu_backward(x, g);
    CHECK(gin.data == std::vector<float>{0.0f, 0.0f, 1.0f});
}

TEST_CASE("maxpool of a constant tensor quarters the spatial size") {
    Tensor x({1, 2, 4, 6}, std::vector<float>(48, 3.5f));
    Tensor y = maxpool_forward(x);
    CHECK(y.shape == std::vector<int>{1, 2, 2, 3});
    for (float v : y.data) CHECK(v == 3.5f);
}

TEST_CASE("maxpool drops trailing odd rows and routes gradients to the max") {
    Tensor x({1, 1, 2, 2}, std::vector<float>{1.0f, 4.0f, 2.0f, 3.0f});
    Tensor y = maxpool_forward(x);
    CHECK(y.data == std::vector<float>{4.0f});
    Tensor g({1, 1, 1, 1}, std::vector<float>{2.0f});
    Tensor gin = maxpool_backward(x, g);
    CHECK(gin.data == std::vector<float>{0.0f, 2.0f, 0.0f, 0.0f});
}

TEST_CASE("dense identity weights with zero bias is the identity map") {
    DenseLayerT<float> layer(3, 3);
    for (int i = 0; i < 3; ++i) layer.weights.at(i, i) = 1.0f;
    Tensor x({2, 3}, std::vector<float>{1, 2, 3, 4, 5, 6});
    Tensor y = dense_forward(x, layer);
    CHECK(y.data == x.data);
}

TEST_CASE("flatten round-trips shape") {
    std::mt19937_64 rng(2);
    Tensor x = random_tensor<float>({2, 3, 4, 5}, rng);
    Tensor f = flatten_forward(x);
    CHECK(f.shape == std::vector<int>{2, 60});
    Tensor back = flatten_backward(x, f);
    CHECK(back.shape == x.shape);
    CHECK(back.data == x.data);
}

TEST_CASE("softmax_xent uniform logits give ln(n)") {
    for (int n = 2; n <= 6; ++n) {
        std::vector<double> logits(static_cast<size_t>(n), 0.7);
        auto [loss, grad] = softmax_xent<double>(logits, n - 1);
        CHECK(loss == doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-12));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += grad[static_cast<size_t>(i)] + (i == n - 1 ? 1.0 : 0.0);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9)); // softmax sums to 1
    }
}

TEST_CASE("softmax_xent saturated logits stay finite") {
    std::vector<double> logits{1000.0, 0.0};
    auto [loss, grad] = softmax_xent<double>(logits, 0);
    CHECK(loss == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::isfinite(grad[0]));
    CHECK(std::isfinite(grad[1]));
}

TEST_CASE("softmax_xent rejects out-of-range labels") {
    std::vector<float> logits{0.1f, 0.2f};
    CHECK_THROWS_AS(softmax_xent<float>(logits, 2), std::invalid_argument);
    CHECK_THROWS_AS(softmax_xent<float>(logits, -1), std::invalid_argument);
}

TEST_CASE("sgd_step_masked freezes, passes and scales per filter") {
    std::mt19937_64 rng(13);
    ConvLayerT<float> layer = random_conv<float>(3, 2, 3, 1, 0, rng);
    const ConvLayerT<float> before = layer;

    LayerGradsT<float> grads;
    grads.weights = random_tensor<float>({3, 2, 3, 3}, rng);
    grads.bias = {0.5f, -0.25f, 1.0f};

    ConvLayerT<float> unit = before;
    std::vector<double> ones{1.0, 1.0, 1.0};
    sgd_step_masked(unit, grads, ones, 0.1);

    SUBCASE("mask 0 freezes the filter") {
        std::vector<double> mask{0.0, 1.0, 1.0};
        sgd_step_masked(layer, grads, mask, 0.1);
        const int per = layer.weights_per_filter();
        for (int i = 0; i < per; ++i)
            CHECK(layer.filter_weights(0)[i] == before.filter_weights(0)[i]);
        CHECK(layer.bias[0] == before.bias[0]);
        for (int i = 0; i < per; ++i)
            CHECK(layer.filter_weights(1)[i] == unit.filter_weights(1)[i]);
    }

    SUBCASE("mask 1 is a standard SGD step") {
        std::vector<double> mask{1.0, 1.0, 1.0};
        sgd_step_masked(layer, grads, mask, 0.1);
        const int per = layer.weights_per_filter();
        for (int f = 0; f < 3; ++f)
            for (int i = 0; i < per; ++i)
                CHECK(layer.filter_weights(f)[i] ==
                      doctest::Approx(before.filter_weights(f)[i] -
                                      0.1f * grads.weights.data[static_cast<size_t>(f * per + i)])
                          .epsilon(1e-6));
    }

    SUBCASE("mask 0.8 scales the update by 0.8") {
        std::vector<double> mask{0.8, 0.8, 0.8};
        sgd_step_masked(layer, grads, mask, 0.1);
        const int per = layer.weights_per_filter();
        for (int f = 0; f < 3; ++f)
            for (int i = 0; i < per; ++i) {
                const double unit_delta =
                    static_cast<double>(unit.filter_weights(f)[i]) - before.filter_weights(f)[i];
                const double masked_delta =
                    static_cast<double>(layer.filter_weights(f)[i]) - before.filter_weights(f)[i];
                CHECK(masked_delta == doctest::Approx(0.8 * unit_delta).epsilon(1e-5));
            }
    }

    SUBCASE("mask length mismatch throws") {
        std::vector<double> mask{1.0, 1.0};
        CHECK_THROWS_AS(sgd_step_masked(layer, grads, mask, 0.1), std::invalid_argument);
    }
}

TEST_CASE("evaluate counts argmax agreement") {
    // model that always predicts class 0: dense with strongly negative other rows
    Model model;
    model.input_shape = {1, 2, 2};
    model.layers.push_back(FlattenLayer{});
    DenseLayerT<float> dense(2, 4);
    for (int j = 0; j < 4; ++j) dense.weights.at(1, j) = -5.0f;
    dense.bias = {1.0f, -1.0f};
    model.layers.push_back(dense);

    Dataset ds;
    ds.class_count = 2;
    ds.images = Tensor({10, 1, 2, 2}, std::vector<float>(40, 0.5f));
    ds.labels = {0, 0, 0, 1, 1, 1, 1, 1, 1, 1}; // 30% class 0
    CHECK(evaluate(model, ds) == doctest::Approx(0.3));

    Dataset empty;
    CHECK_THROWS_AS(evaluate(model, empty), std::invalid_argument);
}

TEST_CASE("conv2d is linear in weights when bias is zero") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        TensorD input = random_tensor<double>({1, 2, 5, 5}, rng);
        ConvLayerT<double> layer = random_conv<double>(3, 2, 3, 1, 1, rng);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
        const double lambda = 0.37 * (trial + 1);
        ConvLayerT<double> scaled = layer;
        for (auto& v : scaled.weights.data) v *= lambda;
        TensorD a = conv2d_forward(input, scaled);
        TensorD b = conv2d_forward(input, layer);
        for (int i = 0; i < a.size(); ++i)
            CHECK(a.data[static_cast<size_t>(i)] ==
                  doctest::Approx(lambda * b.data[static_cast<size_t>(i)]).epsilon(1e-9));
    }
}

TEST_CASE("scaling one filter scales exactly its output channel") {
    std::mt19937_64 rng(19);
    const double fa = 0.8;
    for (int trial = 0; trial < 10; ++trial) {
        TensorD input = random_tensor<double>({2, 3, 6, 6}, rng);
        ConvLayerT<double> layer = random_conv<double>(4, 3, 3, 1, 1, rng);
        TensorD base = conv2d_forward(input, layer);
        ConvLayerT<double> scaled = layer;
        const int target = trial % 4;
        double* w = scaled.filter_weights(target);
        for (int i = 0; i < scaled.weights_per_filter(); ++i) w[i] *= fa;
        scaled.bias[static_cast<size_t>(target)] *= fa;
        TensorD out = conv2d_forward(input, scaled);
        for (int n = 0; n < 2; ++n)
            for (int f = 0; f < 4; ++f)
                for (int h = 0; h < out.dim(2); ++h)
                    for (int ww = 0; ww < out.dim(3); ++ww) {
                        if (f == target)
                            CHECK(out.at(n, f, h, ww) ==
                                  doctest::Approx(fa * base.at(n, f, h, ww)).epsilon(1e-9));
                        else
                            CHECK(out.at(n, f, h, ww) == base.at(n, f, h, ww)); // bit-identical
                    }
    }
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        TensorD input = random_tensor<double>({3, 3, 8, 8}, rng);
        ConvLayerT<double> layer = random_conv<double>(5, 3, 3, 1, 1, rng);
        TensorD fs = conv2d_forward(input, layer, Exec::Serial);
        TensorD fp = conv2d_forward(input, layer, Exec::Parallel);
        CHECK(fs.data == fp.data);
        auto gs = conv2d_backward(input, layer, fs, Exec::Serial);
        auto gp = conv2d_backward(input, layer, fs, Exec::Parallel);
        CHECK(gs.grad_input.data == gp.grad_input.data);
        CHECK(gs.grad_weights.data == gp.grad_weights.data);
        CHECK(gs.grad_bias == gp.grad_bias);

        TensorD flat = random_tensor<double>({4, 10}, rng);
        DenseLayerT<double> dense(3, 10);
        for (auto& v : dense.weights.data) v = random_tensor<double>({1}, rng).data[0];
        TensorD ds = dense_forward(flat, dense, Exec::Serial);
        TensorD dp = dense_forward(flat, dense, Exec::Parallel);
        CHECK(ds.data == dp.data);
        auto dgs = dense_backward(flat, dense, ds, Exec::Serial);
        auto dgp = dense_backward(flat, dense, ds, Exec::Parallel);
        CHECK(dgs.grad_weights.data == dgp.grad_weights.data);
        CHECK(dgs.grad_input.data == dgp.grad_input.data);

        TensorD pool_in = random_tensor<double>({2, 2, 6, 6}, rng);
        CHECK(maxpool_forward(pool_in, Exec::Serial).data ==
              maxpool_forward(pool_in, Exec::Parallel).data);
    }
}

TEST_CASE("fixed seed gives a bit-identical training trajectory") {
    auto run = [](std::uint64_t seed) {
        Dataset ds = gen_synthetic(3, 20, 8, 99, 0.2);
        TrainConfig cfg;
        cfg.learning_rate = 0.05;
        cfg.batch_size = 8;
        cfg.rng_seed = seed;
        std::mt19937_64 rng(cfg.rng_seed);
        Model model;
        model.input_shape = {1, 8, 8};
        model.layers.push_back(ConvLayerT<float>(4, 1, 3, 1, 1));
        model.layers.push_back(ReluLayer{});
        model.layers.push_back(MaxPoolLayer{});
        model.layers.push_back(FlattenLayer{});
        model.layers.push_back(DenseLayerT<float>(3, 4 * 4 * 4));
        init_model_weights(model, rng);
        for (int e = 0; e < 3; ++e) train_epoch(model, ds, cfg, rng);
        return model;
    };
    Model a = run(42), b = run(42), c = run(43);
    const auto& aw = std::get<ConvLayerT<float>>(a.layers[0]).weights.data;
    const auto& bw = std::get<ConvLayerT<float>>(b.layers[0]).weights.data;
    const auto& cw = std::get<ConvLayerT<float>>(c.layers[0]).weights.data;
    CHECK(aw == bw);
    CHECK(aw != cw);
}
