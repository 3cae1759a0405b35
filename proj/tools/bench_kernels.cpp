// Timing comparison between the OpenMP kernels and the serial reference
// loops. Sizes are large enough that the parallel paths actually engage
// (the production kernels fall back to serial below kParallelCutoff).

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ditcache/kernels.hpp"
#include "ditcache/prng.hpp"

namespace {

using ditcache::CounterRng;
namespace kernels = ditcache::kernels;

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    std::vector<double> v(n);
    CounterRng rng(seed);
    for (auto& x : v) x = rng.next_uniform(-1.0, 1.0);
    return v;
}

double time_ms(const std::function<void()>& fn, int repeats) {
    fn();  // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    const std::chrono::duration<double, std::milli> elapsed = stop - start;
    return elapsed.count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-18s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif

    constexpr int kRepeats = 5;

    {
        constexpr std::size_t rows = 256, in_dim = 512, out_dim = 512;
        const auto x = random_vec(rows * in_dim, 1);
        const auto w = random_vec(out_dim * in_dim, 2);
        const auto b = random_vec(out_dim, 3);
        std::vector<double> y(rows * out_dim);
        report("linear",
               time_ms([&] { kernels::ref::linear(x.data(), rows, in_dim,
                                                  w.data(), b.data(), out_dim,
                                                  y.data()); },
                       kRepeats),
               time_ms([&] { kernels::linear(x.data(), rows, in_dim, w.data(),
                                             b.data(), out_dim, y.data()); },
                       kRepeats));
    }
    {
        constexpr std::size_t tokens = 256, heads = 8, head_dim = 64;
        const auto qkv = random_vec(tokens * 3 * heads * head_dim, 4);
        std::vector<double> out(tokens * heads * head_dim);
        report("attention",
               time_ms([&] { kernels::ref::attention(qkv.data(), tokens, heads,
                                                     head_dim, out.data()); },
                       kRepeats),
               time_ms([&] { kernels::attention(qkv.data(), tokens, heads,
                                                head_dim, out.data()); },
                       kRepeats));
    }
    {
        constexpr std::size_t rows = 4096, cols = 512;
        const auto x = random_vec(rows * cols, 5);
        std::vector<double> y(rows * cols);
        report("layer_norm",
               time_ms([&] { kernels::ref::layer_norm_rows(x.data(), rows,
                                                           cols, 1e-6,
                                                           y.data()); },
                       kRepeats),
               time_ms([&] { kernels::layer_norm_rows(x.data(), rows, cols,
                                                      1e-6, y.data()); },
                       kRepeats));
    }
    {
        constexpr std::size_t n = 1 << 24;
        const auto a = random_vec(n, 6);
        const auto b = random_vec(n, 7);
        volatile double sink = 0.0;
        report("sum_abs_diff",
               time_ms([&] { sink = kernels::ref::sum_abs_diff(a.data(),
                                                               b.data(), n); },
                       kRepeats),
               time_ms([&] { sink = kernels::sum_abs_diff(a.data(), b.data(),
                                                          n); },
                       kRepeats));
        (void)sink;
    }
    return 0;
}
