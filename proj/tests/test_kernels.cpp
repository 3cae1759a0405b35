#include <doctest.h>

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ditcache/kernels.hpp"
#include "ditcache/prng.hpp"

using namespace ditcache;
namespace k = ditcache::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    std::vector<double> v(n);
    CounterRng rng(seed);
    for (auto& x : v) x = rng.next_uniform(-1.0, 1.0);
    return v;
}

bool bitwise_equal(const std::vector<double>& a,
                   const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

}  // namespace

// Map-style kernels compute each output element with the same serial inner
// loop in both implementations, so parallel and reference agree bitwise.
TEST_CASE("linear matches serial reference bitwise") {
    constexpr std::size_t rows = 33, in_dim = 48, out_dim = 29;
    const auto x = random_vec(rows * in_dim, 1);
    const auto w = random_vec(out_dim * in_dim, 2);
    const auto b = random_vec(out_dim, 3);
    std::vector<double> got(rows * out_dim), want(rows * out_dim);
    k::linear(x.data(), rows, in_dim, w.data(), b.data(), out_dim, got.data());
    k::ref::linear(x.data(), rows, in_dim, w.data(), b.data(), out_dim,
                   want.data());
    CHECK(bitwise_equal(got, want));
}

TEST_CASE("attention matches serial reference bitwise") {
    constexpr std::size_t tokens = 19, heads = 4, head_dim = 8;
    const auto qkv = random_vec(tokens * 3 * heads * head_dim, 4);
    std::vector<double> got(tokens * heads * head_dim);
    std::vector<double> want(got.size());
    k::attention(qkv.data(), tokens, heads, head_dim, got.data());
    k::ref::attention(qkv.data(), tokens, heads, head_dim, want.data());
    CHECK(bitwise_equal(got, want));
}

TEST_CASE("row kernels match serial reference bitwise") {
    constexpr std::size_t rows = 21, cols = 32;
    const auto x = random_vec(rows * cols, 5);
    const auto scale_vec = random_vec(cols, 6);
    const auto shift_vec = random_vec(cols, 7);

    std::vector<double> got(rows * cols), want(rows * cols);
    k::layer_norm_rows(x.data(), rows, cols, 1e-6, got.data());
    k::ref::layer_norm_rows(x.data(), rows, cols, 1e-6, want.data());
    CHECK(bitwise_equal(got, want));

    k::modulate_rows(x.data(), rows, cols, scale_vec.data(), shift_vec.data(),
                     got.data());
    k::ref::modulate_rows(x.data(), rows, cols, scale_vec.data(),
                          shift_vec.data(), want.data());
    CHECK(bitwise_equal(got, want));

    auto h_got = random_vec(rows * cols, 8);
    auto h_want = h_got;
    k::gated_add_rows(h_got.data(), x.data(), scale_vec.data(), rows, cols);
    k::ref::gated_add_rows(h_want.data(), x.data(), scale_vec.data(), rows,
                           cols);
    CHECK(bitwise_equal(h_got, h_want));
}

TEST_CASE("elementwise kernels match serial reference bitwise") {
    constexpr std::size_t n = 100000;  // above the parallel cutoff
    const auto a = random_vec(n, 9);
    const auto b = random_vec(n, 10);
    std::vector<double> got(n), want(n);

    k::silu(a.data(), n, got.data());
    k::ref::silu(a.data(), n, want.data());
    CHECK(bitwise_equal(got, want));

    k::axpby(0.75, a.data(), -1.25, b.data(), n, got.data());
    k::ref::axpby(0.75, a.data(), -1.25, b.data(), n, want.data());
    CHECK(bitwise_equal(got, want));
}

// Chunked reductions re-associate sums, so the reference comparison is a
// tolerance check, not bitwise; below one chunk both paths are identical.
TEST_CASE("reductions agree with serial reference") {
    for (std::size_t n : {100UL, 4096UL, 4097UL, 1000000UL}) {
        const auto a = random_vec(n, 11);
        const auto b = random_vec(n, 12);
        const double got = k::sum_abs_diff(a.data(), b.data(), n);
        const double want = k::ref::sum_abs_diff(a.data(), b.data(), n);
        CHECK(got == doctest::Approx(want).epsilon(1e-13));
        if (n <= k::kReduceChunk) CHECK(got == want);

        CHECK(k::sum_abs(a.data(), n) ==
              doctest::Approx(k::ref::sum_abs(a.data(), n)).epsilon(1e-13));
        CHECK(k::sum_sq_diff(a.data(), b.data(), n) ==
              doctest::Approx(k::ref::sum_sq_diff(a.data(), b.data(), n))
                  .epsilon(1e-13));
    }
}

TEST_CASE("min_max") {
    const std::vector<double> v{3.0, -1.5, 2.0, 7.25, 0.0};
    double lo = 0.0, hi = 0.0;
    k::min_max(v.data(), v.size(), &lo, &hi);
    CHECK(lo == -1.5);
    CHECK(hi == 7.25);
}

#ifdef _OPENMP
// The production kernels must give bitwise-identical results for any
// thread count; chunk layout and per-element work never depend on it.
TEST_CASE("kernels are thread-count invariant") {
    constexpr std::size_t n = 1 << 20;
    const auto a = random_vec(n, 13);
    const auto b = random_vec(n, 14);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const double sum1 = k::sum_abs_diff(a.data(), b.data(), n);
    std::vector<double> y1(n);
    k::axpby(1.5, a.data(), 0.5, b.data(), n, y1.data());

    omp_set_num_threads(saved > 1 ? saved : 2);
    const double sum2 = k::sum_abs_diff(a.data(), b.data(), n);
    std::vector<double> y2(n);
    k::axpby(1.5, a.data(), 0.5, b.data(), n, y2.data());
    omp_set_num_threads(saved);

    CHECK(sum1 == sum2);
    CHECK(bitwise_equal(y1, y2));
}
#endif
