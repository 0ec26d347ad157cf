// Times the serial reference kernels against the OpenMP ones and checks the
// outputs stay bit-identical across both paths.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "faprune/layers.hpp"

using namespace faprune;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Tensor random_tensor(std::vector<int> shape, std::mt19937_64& rng) {
    Tensor t(std::move(shape));
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (auto& v : t.data) v = dist(rng);
    return t;
}

struct BenchCase {
    const char* name;
    int n, c, h, w, f, k, stride, pad;
};

void run_case(const BenchCase& bc, int reps, std::mt19937_64& rng) {
    ConvLayerT<float> layer(bc.f, bc.c, bc.k, bc.stride, bc.pad);
    std::uniform_real_distribution<float> dist(-0.5f, 0.5f);
    for (auto& v : layer.weights.data) v = dist(rng);
    for (auto& v : layer.bias) v = dist(rng);
    Tensor input = random_tensor({bc.n, bc.c, bc.h, bc.w}, rng);

    Tensor out_serial, out_parallel;
    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) out_serial = conv2d_forward(input, layer, Exec::Serial);
    const double fwd_serial = ms_since(t0) / reps;

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) out_parallel = conv2d_forward(input, layer, Exec::Parallel);
    const double fwd_parallel = ms_since(t0) / reps;

    const bool fwd_same = out_serial.data == out_parallel.data;

    ConvGradsT<float> gs, gp;
    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) gs = conv2d_backward(input, layer, out_serial, Exec::Serial);
    const double bwd_serial = ms_since(t0) / reps;

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) gp = conv2d_backward(input, layer, out_serial, Exec::Parallel);
    const double bwd_parallel = ms_since(t0) / reps;

    const bool bwd_same = gs.grad_input.data == gp.grad_input.data &&
                          gs.grad_weights.data == gp.grad_weights.data &&
                          gs.grad_bias == gp.grad_bias;

    std::printf("%-18s fwd %8.3f ms -> %8.3f ms (x%.2f, %s)   bwd %8.3f ms -> %8.3f ms (x%.2f, %s)\n",
                bc.name, fwd_serial, fwd_parallel,
                fwd_parallel > 0 ? fwd_serial / fwd_parallel : 0.0,
                fwd_same ? "bit-identical" : "MISMATCH", bwd_serial, bwd_parallel,
                bwd_parallel > 0 ? bwd_serial / bwd_parallel : 0.0,
                bwd_same ? "bit-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    int reps = 5;
    if (argc > 1) reps = std::max(1, std::atoi(argv[1]));
#ifdef _OPENMP
    std::printf("OpenMP threads: %d, reps per case: %d\n", omp_get_max_threads(), reps);
#else
    std::printf("built without OpenMP; both paths run serially (reps: %d)\n", reps);
#endif

    std::mt19937_64 rng(12345);
    const BenchCase cases[] = {
        {"conv 8x1x32x32", 8, 1, 32, 32, 8, 3, 1, 1},
        {"conv 16x8x16x16", 16, 8, 16, 16, 16, 3, 1, 1},
        {"conv 32x16x16x16", 32, 16, 16, 16, 32, 3, 1, 1},
        {"conv 8x3x32x32 k5", 8, 3, 32, 32, 12, 5, 1, 2},
    };
    for (const BenchCase& bc : cases) run_case(bc, reps, rng);
    return 0;
}
