#ifndef DITCACHE_SCHEDULE_HPP_
#define DITCACHE_SCHEDULE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "ditcache/tensor.hpp"

namespace ditcache {

// Per-timestep noise coefficients. Steps are 1-indexed to match the usual
// forward-process convention: alphas[t-1] is the alpha applied at step t,
// alpha_bars[t-1] the cumulative product through step t.
struct NoiseSchedule {
    std::size_t steps = 0;
    std::vector<double> alphas;
    std::vector<double> alpha_bars;
    double beta_start = 0.0;
    double beta_end = 0.0;

    double alpha(std::size_t t) const { return alphas[t - 1]; }
    double alpha_bar(std::size_t t) const {
        return t == 0 ? 1.0 : alpha_bars[t - 1];
    }
    std::string id_string() const;
};

// Betas linearly interpolated inclusive of both endpoints. Requires
// 0 < beta_start <= beta_end < 1 and steps >= 2; throws BadRange otherwise.
NoiseSchedule linear_beta_schedule(std::size_t steps, double beta_start,
                                   double beta_end);

// sqrt(alpha_t) * x_prev + sqrt(1 - alpha_t) * noise, t in [1, steps].
Tensor forward_diffuse(const Tensor& x_prev, std::size_t t,
                       const NoiseSchedule& schedule, const Tensor& noise);

// Deterministic reverse update with model_output read as the noise
// prediction: recover x0, then re-noise to level t-1. At t == 1 the result
// is the x0 estimate itself.
Tensor denoise_step(const Tensor& x_t, const Tensor& model_output,
                    std::size_t t, const NoiseSchedule& schedule);

}  // namespace ditcache

#endif  // DITCACHE_SCHEDULE_HPP_
