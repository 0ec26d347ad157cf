#pragma once

// Raw compute kernels behind the layer operations.
//
// Shape conventions (NCHW, row-major):
//   input:   [N, C, H, W]
//   weights: [F, C, K, K]   (out_channels, in_channels, kernel, kernel)
//   output:  [N, F, Ho, Wo] with Ho = (H + 2*pad - K) / stride + 1
//
// Two implementations with identical signatures:
//   kser:: single-threaded reference path (the deterministic one)
//   kpar:: OpenMP path, parallelized so that each output element keeps the
//          reference accumulation order; results are bit-identical to kser.

namespace faprune {

struct ConvDims {
    int n, c, h, w;      // input
    int f, k;            // filters, kernel
    int stride, pad;
    int ho, wo;          // output spatial
};

namespace kser {

template <typename T>
void conv2d_forward(const T* in, const T* w, const T* b, T* out, const ConvDims& d);

template <typename T>
void conv2d_backward(const T* in, const T* w, const T* gout,
                     T* gin, T* gw, T* gb, const ConvDims& d);

template <typename T>
void dense_forward(const T* in, const T* w, const T* b, T* out, int n, int in_dim, int out_dim);

template <typename T>
void dense_backward(const T* in, const T* w, const T* gout,
                    T* gin, T* gw, T* gb, int n, int in_dim, int out_dim);

template <typename T>
void relu_forward(const T* in, T* out, int count);

template <typename T>
void relu_backward(const T* in, const T* gout, T* gin, int count);

// 2x2 max pooling, stride 2, floor output dims; ties keep the first maximum
// in row-major window order.
template <typename T>
void maxpool2_forward(const T* in, T* out, int n, int c, int h, int w);

template <typename T>
void maxpool2_backward(const T* in, const T* gout, T* gin, int n, int c, int h, int w);

} // namespace kser

namespace kpar {

template <typename T>
void conv2d_forward(const T* in, const T* w, const T* b, T* out, const ConvDims& d);

template <typename T>
void conv2d_backward(const T* in, const T* w, const T* gout,
                     T* gin, T* gw, T* gb, const ConvDims& d);

template <typename T>
void dense_forward(const T* in, const T* w, const T* b, T* out, int n, int in_dim, int out_dim);

template <typename T>
void dense_backward(const T* in, const T* w, const T* gout,
                    T* gin, T* gw, T* gb, int n, int in_dim, int out_dim);

template <typename T>
void relu_forward(const T* in, T* out, int count);

template <typename T>
void relu_backward(const T* in, const T* gout, T* gin, int count);

template <typename T>
void maxpool2_forward(const T* in, T* out, int n, int c, int h, int w);

template <typename T>
void maxpool2_backward(const T* in, const T* gout, T* gin, int n, int c, int h, int w);

} // namespace kpar

} // namespace faprune
