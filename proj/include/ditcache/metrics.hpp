#ifndef DITCACHE_METRICS_HPP_
#define DITCACHE_METRICS_HPP_

#include <cstddef>
#include <vector>

#include "ditcache/baselines.hpp"
#include "ditcache/policy.hpp"
#include "ditcache/tensor.hpp"

namespace ditcache {

struct QualityReport {
    double mse = 0.0;
    double psnr = 0.0;  // +infinity when mse == 0
    double ssim = 0.0;
    double rel_l1 = 0.0;
};

double mse(const Tensor& a, const Tensor& b);

// 10 log10(data_range^2 / mse); +infinity sentinel for identical inputs.
double psnr(const Tensor& a, const Tensor& b, double data_range);

// Mean of 8x8 stride-8 window SSIM over the declared 2-D grid; the usual
// stabilization constants C1=(0.01 r)^2, C2=(0.03 r)^2. Partial windows at
// the edges are dropped. Throws GridTooSmall below one full window.
double ssim(const Tensor& a, const Tensor& b, std::size_t grid_rows,
            std::size_t grid_cols, double data_range);

// Pearson correlation; throws DegenerateVariance when either side is
// constant, BadRange on length mismatch or length < 2.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// |a intersect b| / |a union b| over computed-step sets.
double schedule_jaccard(const ScheduleSet& a, const ScheduleSet& b);

// Model-evaluation speedup proxy: T / computed_steps.
double speedup_ratio(const RunStats& stats, std::size_t steps);

// PSNR/SSIM/rel-L1 of `test` against `reference` with data_range taken
// from the reference's observed value range; SSIM grid is the tensor's own
// 2-D shape.
QualityReport compare_latents(const Tensor& test, const Tensor& reference);

}  // namespace ditcache

#endif  // DITCACHE_METRICS_HPP_
