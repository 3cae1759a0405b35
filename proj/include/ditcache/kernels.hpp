#ifndef DITCACHE_KERNELS_HPP_
#define DITCACHE_KERNELS_HPP_

#include <cstddef>

// Data-parallel kernels shared by the tensor ops and the model forward
// pass. The OpenMP versions are written so that every output element (or
// fixed reduction chunk) is computed by exactly the same serial inner loop
// regardless of thread count, which keeps results bitwise identical across
// serial builds, OMP_NUM_THREADS settings, and repeated runs. The
// kernels::ref namespace holds plain serial loops kept as the reference
// implementation for tests and the kernel benchmark.

namespace ditcache::kernels {

// Reductions accumulate fixed-size chunks in index order; the chunk layout
// never depends on the thread count.
inline constexpr std::size_t kReduceChunk = 4096;
// Element counts below this run serially; thread startup would dominate.
inline constexpr std::size_t kParallelCutoff = 16384;

// y[r*out_dim + o] = b[o] + sum_k x[r*in_dim + k] * w[o*in_dim + k].
// Weights are stored row-per-output. b may be null.
void linear(const double* x, std::size_t rows, std::size_t in_dim,
            const double* w, const double* b, std::size_t out_dim, double* y);

// Parameter-free layer norm over each row: (x - mean) / sqrt(var + eps).
void layer_norm_rows(const double* x, std::size_t rows, std::size_t cols,
                     double eps, double* y);

// y[r][c] = x[r][c] * (1 + scale[c]) + shift[c].
void modulate_rows(const double* x, std::size_t rows, std::size_t cols,
                   const double* scale, const double* shift, double* y);

// h[r][c] += gate[c] * y[r][c].
void gated_add_rows(double* h, const double* y, const double* gate,
                    std::size_t rows, std::size_t cols);

// Multi-head self attention over packed qkv rows [q | k | v], each of
// width heads*head_dim. out has width heads*head_dim.
void attention(const double* qkv, std::size_t tokens, std::size_t heads,
               std::size_t head_dim, double* out);

void silu(const double* x, std::size_t n, double* y);
void add(const double* a, const double* b, std::size_t n, double* y);
void sub(const double* a, const double* b, std::size_t n, double* y);
void scale(const double* a, double factor, std::size_t n, double* y);
// y = ca * a + cb * b
void axpby(double ca, const double* a, double cb, const double* b,
           std::size_t n, double* y);

double sum_abs(const double* x, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void min_max(const double* x, std::size_t n, double* lo, double* hi);

namespace ref {

void linear(const double* x, std::size_t rows, std::size_t in_dim,
            const double* w, const double* b, std::size_t out_dim, double* y);
void layer_norm_rows(const double* x, std::size_t rows, std::size_t cols,
                     double eps, double* y);
void modulate_rows(const double* x, std::size_t rows, std::size_t cols,
                   const double* scale, const double* shift, double* y);
void gated_add_rows(double* h, const double* y, const double* gate,
                    std::size_t rows, std::size_t cols);
void attention(const double* qkv, std::size_t tokens, std::size_t heads,
               std::size_t head_dim, double* out);
void silu(const double* x, std::size_t n, double* y);
void add(const double* a, const double* b, std::size_t n, double* y);
void sub(const double* a, const double* b, std::size_t n, double* y);
void scale(const double* a, double factor, std::size_t n, double* y);
void axpby(double ca, const double* a, double cb, const double* b,
           std::size_t n, double* y);
double sum_abs(const double* x, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void min_max(const double* x, std::size_t n, double* lo, double* hi);

}  // namespace ref

}  // namespace ditcache::kernels

#endif  // DITCACHE_KERNELS_HPP_
