#include "ditcache/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace ditcache::kernels {

namespace {

inline double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

inline void softmax_inplace(double* row, std::size_t n) {
    double hi = row[0];
    for (std::size_t i = 1; i < n; ++i) hi = std::max(hi, row[i]);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        row[i] = std::exp(row[i] - hi);
        total += row[i];
    }
    const double inv = 1.0 / total;
    for (std::size_t i = 0; i < n; ++i) row[i] *= inv;
}

inline void norm_row(const double* x, std::size_t cols, double eps, double* y) {
    double mean = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mean += x[c];
    mean /= static_cast<double>(cols);
    double var = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
        const double d = x[c] - mean;
        var += d * d;
    }
    var /= static_cast<double>(cols);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < cols; ++c) y[c] = (x[c] - mean) * inv;
}

// One query row of one head: scores against all keys, softmax, weighted sum
// of values. qkv rows are [q | k | v], each heads*head_dim wide.
inline void attend_query(const double* qkv, std::size_t tokens,
                         std::size_t heads, std::size_t head_dim,
                         std::size_t head, std::size_t query, double* out,
                         double* scores) {
    const std::size_t width = heads * head_dim;
    const std::size_t stride = 3 * width;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
    const double* q = qkv + query * stride + head * head_dim;
    for (std::size_t j = 0; j < tokens; ++j) {
        const double* k = qkv + j * stride + width + head * head_dim;
        scores[j] = dot(q, k, head_dim) * inv_sqrt;
    }
    softmax_inplace(scores, tokens);
    double* dst = out + query * width + head * head_dim;
    std::fill(dst, dst + head_dim, 0.0);
    for (std::size_t j = 0; j < tokens; ++j) {
        const double* v = qkv + j * stride + 2 * width + head * head_dim;
        const double p = scores[j];
        for (std::size_t d = 0; d < head_dim; ++d) dst[d] += p * v[d];
    }
}

inline double chunk_sum_abs(const double* x, std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += std::fabs(x[i]);
    return acc;
}

inline double chunk_sum_abs_diff(const double* a, const double* b,
                                 std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

inline double chunk_sum_sq_diff(const double* a, const double* b,
                                std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

void linear(const double* x, std::size_t rows, std::size_t in_dim,
            const double* w, const double* b, std::size_t out_dim, double* y) {
    const std::int64_t total = static_cast<std::int64_t>(rows * out_dim);
#pragma omp parallel for schedule(static) if (rows * out_dim * in_dim >= kParallelCutoff)
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const std::size_t r = static_cast<std::size_t>(idx) / out_dim;
        const std::size_t o = static_cast<std::size_t>(idx) % out_dim;
        double acc = b ? b[o] : 0.0;
        acc += dot(x + r * in_dim, w + o * in_dim, in_dim);
        y[idx] = acc;
    }
}

void layer_norm_rows(const double* x, std::size_t rows, std::size_t cols,
                     double eps, double* y) {
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelCutoff)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(rows); ++r) {
        norm_row(x + r * cols, cols, eps, y + r * cols);
    }
}

void modulate_rows(const double* x, std::size_t rows, std::size_t cols,
                   const double* scale, const double* shift, double* y) {
    const std::int64_t total = static_cast<std::int64_t>(rows * cols);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelCutoff)
    for (std::int64_t i = 0; i < total; ++i) {
        const std::size_t c = static_cast<std::size_t>(i) % cols;
        y[i] = x[i] * (1.0 + scale[c]) + shift[c];
    }
}

void gated_add_rows(double* h, const double* y, const double* gate,
                    std::size_t rows, std::size_t cols) {
    const std::int64_t total = static_cast<std::int64_t>(rows * cols);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelCutoff)
    for (std::int64_t i = 0; i < total; ++i) {
        const std::size_t c = static_cast<std::size_t>(i) % cols;
        h[i] += gate[c] * y[i];
    }
}

void attention(const double* qkv, std::size_t tokens, std::size_t heads,
               std::size_t head_dim, double* out) {
    const std::int64_t total = static_cast<std::int64_t>(heads * tokens);
#pragma omp parallel if (heads * tokens * tokens * head_dim >= kParallelCutoff)
    {
        std::vector<double> scores(tokens);  // per-thread scratch
#pragma omp for schedule(static)
        for (std::int64_t idx = 0; idx < total; ++idx) {
            const std::size_t head = static_cast<std::size_t>(idx) / tokens;
            const std::size_t query = static_cast<std::size_t>(idx) % tokens;
            attend_query(qkv, tokens, heads, head_dim, head, query, out,
                         scores.data());
        }
    }
}

void silu(const double* x, std::size_t n, double* y) {
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        y[i] = x[i] / (1.0 + std::exp(-x[i]));
    }
}

void add(const double* a, const double* b, std::size_t n, double* y) {
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        y[i] = a[i] + b[i];
    }
}

void sub(const double* a, const double* b, std::size_t n, double* y) {
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        y[i] = a[i] - b[i];
    }
}

void scale(const double* a, double factor, std::size_t n, double* y) {
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        y[i] = a[i] * factor;
    }
}

void axpby(double ca, const double* a, double cb, const double* b,
           std::size_t n, double* y) {
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        y[i] = ca * a[i] + cb * b[i];
    }
}

double sum_abs(const double* x, std::size_t n) {
    if (n <= kReduceChunk) return chunk_sum_abs(x, 0, n);
    const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(chunks);
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t hi = std::min(lo + kReduceChunk, n);
        partial[c] = chunk_sum_abs(x, lo, hi);
    }
    double acc = 0.0;
    for (double p : partial) acc += p;
    return acc;
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
    if (n <= kReduceChunk) return chunk_sum_abs_diff(a, b, 0, n);
    const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(chunks);
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t hi = std::min(lo + kReduceChunk, n);
        partial[c] = chunk_sum_abs_diff(a, b, lo, hi);
    }
    double acc = 0.0;
    for (double p : partial) acc += p;
    return acc;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    if (n <= kReduceChunk) return chunk_sum_sq_diff(a, b, 0, n);
    const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(chunks);
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t hi = std::min(lo + kReduceChunk, n);
        partial[c] = chunk_sum_sq_diff(a, b, lo, hi);
    }
    double acc = 0.0;
    for (double p : partial) acc += p;
    return acc;
}

void min_max(const double* x, std::size_t n, double* lo, double* hi) {
    double mn = x[0];
    double mx = x[0];
    // min/max are exact and order-insensitive; a serial pass keeps it simple.
    for (std::size_t i = 1; i < n; ++i) {
        mn = std::min(mn, x[i]);
        mx = std::max(mx, x[i]);
    }
    *lo = mn;
    *hi = mx;
}

namespace ref {

void linear(const double* x, std::size_t rows, std::size_t in_dim,
            const double* w, const double* b, std::size_t out_dim, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t o = 0; o < out_dim; ++o) {
            double acc = b ? b[o] : 0.0;
            acc += dot(x + r * in_dim, w + o * in_dim, in_dim);
            y[r * out_dim + o] = acc;
        }
    }
}

void layer_norm_rows(const double* x, std::size_t rows, std::size_t cols,
                     double eps, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        norm_row(x + r * cols, cols, eps, y + r * cols);
    }
}

void modulate_rows(const double* x, std::size_t rows, std::size_t cols,
                   const double* scale, const double* shift, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            y[r * cols + c] = x[r * cols + c] * (1.0 + scale[c]) + shift[c];
        }
    }
}

void gated_add_rows(double* h, const double* y, const double* gate,
                    std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            h[r * cols + c] += gate[c] * y[r * cols + c];
        }
    }
}

void attention(const double* qkv, std::size_t tokens, std::size_t heads,
               std::size_t head_dim, double* out) {
    std::vector<double> scores(tokens);
    for (std::size_t head = 0; head < heads; ++head) {
        for (std::size_t query = 0; query < tokens; ++query) {
            attend_query(qkv, tokens, heads, head_dim, head, query, out,
                         scores.data());
        }
    }
}

void silu(const double* x, std::size_t n, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] / (1.0 + std::exp(-x[i]));
}

void add(const double* a, const double* b, std::size_t n, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, std::size_t n, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}

void scale(const double* a, double factor, std::size_t n, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * factor;
}

void axpby(double ca, const double* a, double cb, const double* b,
           std::size_t n, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = ca * a[i] + cb * b[i];
}

double sum_abs(const double* x, std::size_t n) {
    return chunk_sum_abs(x, 0, n);
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
    return chunk_sum_abs_diff(a, b, 0, n);
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    return chunk_sum_sq_diff(a, b, 0, n);
}

void min_max(const double* x, std::size_t n, double* lo, double* hi) {
    kernels::min_max(x, n, lo, hi);
}

}  // namespace ref

}  // namespace ditcache::kernels
