#include "faprune/kernels.hpp"

#include <algorithm>

namespace faprune {
namespace kser {

template <typename T>
void conv2d_forward(const T* in, const T* w, const T* b, T* out, const ConvDims& d) {
    for (int n = 0; n < d.n; ++n) {
        for (int f = 0; f < d.f; ++f) {
            for (int oh = 0; oh < d.ho; ++oh) {
                for (int ow = 0; ow < d.wo; ++ow) {
                    T acc = b[f];
                    for (int c = 0; c < d.c; ++c) {
                        for (int kh = 0; kh < d.k; ++kh) {
                            const int ih = oh * d.stride + kh - d.pad;
                            if (ih < 0 || ih >= d.h) continue;
                            for (int kw = 0; kw < d.k; ++kw) {
                                const int iw = ow * d.stride + kw - d.pad;
                                if (iw < 0 || iw >= d.w) continue;
                                acc += in[((n * d.c + c) * d.h + ih) * d.w + iw] *
                                       w[((f * d.c + c) * d.k + kh) * d.k + kw];
                            }
                        }
                    }
                    out[((n * d.f + f) * d.ho + oh) * d.wo + ow] = acc;
                }
            }
        }
    }
}

// Three separate passes (bias, weights, input) so each output element has a
// single fixed accumulation order shared with the parallel path.
template <typename T>
void conv2d_backward(const T* in, const T* w, const T* gout,
                     T* gin, T* gw, T* gb, const ConvDims& d) {
    std::fill(gin, gin + static_cast<size_t>(d.n) * d.c * d.h * d.w, T(0));
    std::fill(gw, gw + static_cast<size_t>(d.f) * d.c * d.k * d.k, T(0));
    std::fill(gb, gb + d.f, T(0));

    for (int f = 0; f < d.f; ++f) {
        T acc = T(0);
        for (int n = 0; n < d.n; ++n)
            for (int oh = 0; oh < d.ho; ++oh)
                for (int ow = 0; ow < d.wo; ++ow)
                    acc += gout[((n * d.f + f) * d.ho + oh) * d.wo + ow];
        gb[f] = acc;
    }

    for (int f = 0; f < d.f; ++f) {
        for (int n = 0; n < d.n; ++n) {
            for (int oh = 0; oh < d.ho; ++oh) {
                for (int ow = 0; ow < d.wo; ++ow) {
                    const T go = gout[((n * d.f + f) * d.ho + oh) * d.wo + ow];
                    for (int c = 0; c < d.c; ++c) {
                        for (int kh = 0; kh < d.k; ++kh) {
                            const int ih = oh * d.stride + kh - d.pad;
                            if (ih < 0 || ih >= d.h) continue;
                            for (int kw = 0; kw < d.k; ++kw) {
                                const int iw = ow * d.stride + kw - d.pad;
                                if (iw < 0 || iw >= d.w) continue;
                                gw[((f * d.c + c) * d.k + kh) * d.k + kw] +=
                                    in[((n * d.c + c) * d.h + ih) * d.w + iw] * go;
                            }
                        }
                    }
                }
            }
        }
    }

    for (int n = 0; n < d.n; ++n) {
        for (int f = 0; f < d.f; ++f) {
            for (int oh = 0; oh < d.ho; ++oh) {
                for (int ow = 0; ow < d.wo; ++ow) {
                    const T go = gout[((n * d.f + f) * d.ho + oh) * d.wo + ow];
                    for (int c = 0; c < d.c; ++c) {
                        for (int kh = 0; kh < d.k; ++kh) {
                            const int ih = oh * d.stride + kh - d.pad;
                            if (ih < 0 || ih >= d.h) continue;
                            for (int kw = 0; kw < d.k; ++kw) {
                                const int iw = ow * d.stride + kw - d.pad;
                                if (iw < 0 || iw >= d.w) continue;
                                gin[((n * d.c + c) * d.h + ih) * d.w + iw] +=
                                    w[((f * d.c + c) * d.k + kh) * d.k + kw] * go;
                            }
                        }
                    }
                }
            }
        }
    }
}

template <typename T>
void dense_forward(const T* in, const T* w, const T* b, T* out, int n, int in_dim, int out_dim) {
    for (int i = 0; i < n; ++i) {
        for (int o = 0; o < out_dim; ++o) {
            T acc = b[o];
            for (int j = 0; j < in_dim; ++j)
                acc += w[o * in_dim + j] * in[i * in_dim + j];
            out[i * out_dim + o] = acc;
        }
    }
}

template <typename T>
void dense_backward(const T* in, const T* w, const T* gout,
                    T* gin, T* gw, T* gb, int n, int in_dim, int out_dim) {
    std::fill(gin, gin + static_cast<size_t>(n) * in_dim, T(0));
    std::fill(gw, gw + static_cast<size_t>(out_dim) * in_dim, T(0));
    std::fill(gb, gb + out_dim, T(0));

    for (int o = 0; o < out_dim; ++o) {
        T acc = T(0);
        for (int i = 0; i < n; ++i) acc += gout[i * out_dim + o];
        gb[o] = acc;
        for (int i = 0; i < n; ++i) {
            const T go = gout[i * out_dim + o];
            for (int j = 0; j < in_dim; ++j)
                gw[o * in_dim + j] += go * in[i * in_dim + j];
        }
    }

    for (int i = 0; i < n; ++i) {
        for (int o = 0; o < out_dim; ++o) {
            const T go = gout[i * out_dim + o];
            for (int j = 0; j < in_dim; ++j)
                gin[i * in_dim + j] += w[o * in_dim + j] * go;
        }
    }
}

template <typename T>
void relu_forward(const T* in, T* out, int count) {
    for (int i = 0; i < count; ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
}

template <typename T>
void relu_backward(const T* in, const T* gout, T* gin, int count) {
    for (int i = 0; i < count; ++i) gin[i] = in[i] > T(0) ? gout[i] : T(0);
}

template <typename T>
void maxpool2_forward(const T* in, T* out, int n, int c, int h, int w) {
    const int ho = h / 2, wo = w / 2;
    for (int i = 0; i < n; ++i) {
        for (int ch = 0; ch < c; ++ch) {
            const T* src = in + (static_cast<size_t>(i) * c + ch) * h * w;
            T* dst = out + (static_cast<size_t>(i) * c + ch) * ho * wo;
            for (int oh = 0; oh < ho; ++oh) {
                for (int ow = 0; ow < wo; ++ow) {
                    T best = src[(oh * 2) * w + ow * 2];
                    for (int dy = 0; dy < 2; ++dy)
                        for (int dx = 0; dx < 2; ++dx) {
                            const T v = src[(oh * 2 + dy) * w + ow * 2 + dx];
                            if (v > best) best = v;
                        }
                    dst[oh * wo + ow] = best;
                }
            }
        }
    }
}

template <typename T>
void maxpool2_backward(const T* in, const T* gout, T* gin, int n, int c, int h, int w) {
    const int ho = h / 2, wo = w / 2;
    std::fill(gin, gin + static_cast<size_t>(n) * c * h * w, T(0));
    for (int i = 0; i < n; ++i) {
        for (int ch = 0; ch < c; ++ch) {
            const T* src = in + (static_cast<size_t>(i) * c + ch) * h * w;
            const T* go = gout + (static_cast<size_t>(i) * c + ch) * ho * wo;
            T* gi = gin + (static_cast<size_t>(i) * c + ch) * h * w;
            for (int oh = 0; oh < ho; ++oh) {
                for (int ow = 0; ow < wo; ++ow) {
                    int by = oh * 2, bx = ow * 2;
                    T best = src[by * w + bx];
                    for (int dy = 0; dy < 2; ++dy)
                        for (int dx = 0; dx < 2; ++dx) {
                            const T v = src[(oh * 2 + dy) * w + ow * 2 + dx];
                            if (v > best) { best = v; by = oh * 2 + dy; bx = ow * 2 + dx; }
                        }
                    gi[by * w + bx] += go[oh * wo + ow];
                }
            }
        }
    }
}

#define FAPRUNE_INSTANTIATE(T)                                                             \
    template void conv2d_forward<T>(const T*, const T*, const T*, T*, const ConvDims&);    \
    template void conv2d_backward<T>(const T*, const T*, const T*, T*, T*, T*,             \
                                     const ConvDims&);                                     \
    template void dense_forward<T>(const T*, const T*, const T*, T*, int, int, int);       \
    template void dense_backward<T>(const T*, const T*, const T*, T*, T*, T*, int, int,    \
                                    int);                                                  \
    template void relu_forward<T>(const T*, T*, int);                                      \
    template void relu_backward<T>(const T*, const T*, T*, int);                           \
    template void maxpool2_forward<T>(const T*, T*, int, int, int, int);                   \
    template void maxpool2_backward<T>(const T*, const T*, T*, int, int, int, int);

FAPRUNE_INSTANTIATE(float)
FAPRUNE_INSTANTIATE(double)

#undef FAPRUNE_INSTANTIATE

} // namespace kser
} // namespace faprune
