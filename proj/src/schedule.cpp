#include "ditcache/schedule.hpp"

#include <cmath>
#include <cstdio>

#include "ditcache/errors.hpp"
#include "ditcache/kernels.hpp"

namespace ditcache {

std::string NoiseSchedule::id_string() const {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "T%zu-b%.6g-%.6g", steps, beta_start,
                  beta_end);
    return buf;
}

NoiseSchedule linear_beta_schedule(std::size_t steps, double beta_start,
                                   double beta_end) {
    if (steps < 2) throw BadRange("schedule needs at least 2 steps");
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
        throw BadRange("betas must satisfy 0 < beta_start <= beta_end < 1");
    }
    NoiseSchedule s;
    s.steps = steps;
    s.beta_start = beta_start;
    s.beta_end = beta_end;
    s.alphas.resize(steps);
    s.alpha_bars.resize(steps);
    double running = 1.0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double beta =
            beta_start + (beta_end - beta_start) * static_cast<double>(i) /
                             static_cast<double>(steps - 1);
        s.alphas[i] = 1.0 - beta;
        running *= s.alphas[i];
        s.alpha_bars[i] = running;
    }
    return s;
}

Tensor forward_diffuse(const Tensor& x_prev, std::size_t t,
                       const NoiseSchedule& schedule, const Tensor& noise) {
    if (t < 1 || t > schedule.steps) {
        throw BadRange("forward_diffuse: step out of range");
    }
    throw_if_shape_mismatch(x_prev, noise, "forward_diffuse");
    const double a = schedule.alpha(t);
    Tensor out(x_prev.shape());
    kernels::axpby(std::sqrt(a), x_prev.data(), std::sqrt(1.0 - a),
                   noise.data(), x_prev.numel(), out.data());
    return out;
}

Tensor denoise_step(const Tensor& x_t, const Tensor& model_output,
                    std::size_t t, const NoiseSchedule& schedule) {
    if (t < 1 || t > schedule.steps) {
        throw BadRange("denoise_step: step out of range");
    }
    throw_if_shape_mismatch(x_t, model_output, "denoise_step");
    const double ab_t = schedule.alpha_bar(t);
    const double ab_prev = schedule.alpha_bar(t - 1);

    // x0 = (x_t - sqrt(1 - ab_t) * eps) / sqrt(ab_t)
    Tensor x0(x_t.shape());
    kernels::axpby(1.0 / std::sqrt(ab_t), x_t.data(),
                   -std::sqrt(1.0 - ab_t) / std::sqrt(ab_t),
                   model_output.data(), x_t.numel(), x0.data());

    Tensor out(x_t.shape());
    kernels::axpby(std::sqrt(ab_prev), x0.data(), std::sqrt(1.0 - ab_prev),
                   model_output.data(), x_t.numel(), out.data());
    return out;
}

}  // namespace ditcache
