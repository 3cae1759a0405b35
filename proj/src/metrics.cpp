#include "ditcache/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ditcache/errors.hpp"
#include "ditcache/kernels.hpp"

namespace ditcache {

namespace {

constexpr std::size_t kSsimWindow = 8;

struct WindowMoments {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    double cov = 0.0;
};

WindowMoments window_moments(const Tensor& a, const Tensor& b,
                             std::size_t grid_cols, std::size_t row0,
                             std::size_t col0) {
    WindowMoments m;
    constexpr double n = static_cast<double>(kSsimWindow * kSsimWindow);
    for (std::size_t r = 0; r < kSsimWindow; ++r) {
        for (std::size_t c = 0; c < kSsimWindow; ++c) {
            const std::size_t i = (row0 + r) * grid_cols + (col0 + c);
            m.mean_a += a[i];
            m.mean_b += b[i];
        }
    }
    m.mean_a /= n;
    m.mean_b /= n;
    for (std::size_t r = 0; r < kSsimWindow; ++r) {
        for (std::size_t c = 0; c < kSsimWindow; ++c) {
            const std::size_t i = (row0 + r) * grid_cols + (col0 + c);
            const double da = a[i] - m.mean_a;
            const double db = b[i] - m.mean_b;
            m.var_a += da * da;
            m.var_b += db * db;
            m.cov += da * db;
        }
    }
    m.var_a /= n;
    m.var_b /= n;
    m.cov /= n;
    return m;
}

}  // namespace

double mse(const Tensor& a, const Tensor& b) {
    throw_if_shape_mismatch(a, b, "mse");
    return kernels::sum_sq_diff(a.data(), b.data(), a.numel()) /
           static_cast<double>(a.numel());
}

double psnr(const Tensor& a, const Tensor& b, double data_range) {
    if (!(data_range > 0.0)) throw BadRange("psnr: data_range must be > 0");
    const double err = mse(a, b);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(data_range * data_range / err);
}

double ssim(const Tensor& a, const Tensor& b, std::size_t grid_rows,
            std::size_t grid_cols, double data_range) {
    throw_if_shape_mismatch(a, b, "ssim");
    if (!(data_range > 0.0)) throw BadRange("ssim: data_range must be > 0");
    if (grid_rows * grid_cols != a.numel()) {
        throw ShapeMismatch("ssim: grid does not match element count");
    }
    if (grid_rows < kSsimWindow || grid_cols < kSsimWindow) {
        throw GridTooSmall("ssim: grid smaller than one 8x8 window");
    }
    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);

    double total = 0.0;
    std::size_t windows = 0;
    for (std::size_t row0 = 0; row0 + kSsimWindow <= grid_rows;
         row0 += kSsimWindow) {
        for (std::size_t col0 = 0; col0 + kSsimWindow <= grid_cols;
             col0 += kSsimWindow) {
            const WindowMoments m =
                window_moments(a, b, grid_cols, row0, col0);
            const double num = (2.0 * m.mean_a * m.mean_b + c1) *
                               (2.0 * m.cov + c2);
            const double den =
                (m.mean_a * m.mean_a + m.mean_b * m.mean_b + c1) *
                (m.var_a + m.var_b + c2);
            total += num / den;
            windows += 1;
        }
    }
    return total / static_cast<double>(windows);
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw BadRange("pearson: need equal lengths >= 2");
    }
    const double n = static_cast<double>(xs.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateVariance("pearson: constant input");
    }
    return sxy / std::sqrt(sxx * syy);
}

double schedule_jaccard(const ScheduleSet& a, const ScheduleSet& b) {
    std::size_t inter = 0;
    for (int step : a.computed) {
        if (b.contains(step)) inter += 1;
    }
    const std::size_t uni = a.computed.size() + b.computed.size() - inter;
    if (uni == 0) return 1.0;  // two empty sets agree vacuously
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double speedup_ratio(const RunStats& stats, std::size_t steps) {
    if (stats.computed_steps == 0) {
        throw BadRange("speedup_ratio: no computed steps");
    }
    return static_cast<double>(steps) /
           static_cast<double>(stats.computed_steps);
}

QualityReport compare_latents(const Tensor& test, const Tensor& reference) {
    throw_if_shape_mismatch(test, reference, "compare_latents");
    double lo = 0.0;
    double hi = 0.0;
    kernels::min_max(reference.data(), reference.numel(), &lo, &hi);
    const double range = (hi > lo) ? hi - lo : 1.0;
    QualityReport report;
    report.mse = mse(test, reference);
    report.psnr = psnr(test, reference, range);
    report.ssim = ssim(test, reference, reference.dim(0), reference.dim(1),
                       range);
    report.rel_l1 = rel_l1_distance(test, reference);
    return report;
}

}  // namespace ditcache
