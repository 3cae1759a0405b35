#include "ditcache/baselines.hpp"

#include <algorithm>

#include "ditcache/errors.hpp"

namespace ditcache {

bool ScheduleSet::contains(int step) const {
    return std::binary_search(computed.begin(), computed.end(), step);
}

ScheduleSet uniform_cache_schedule(std::size_t steps, std::size_t interval) {
    if (interval < 1 || interval > steps) {
        throw BadInterval("uniform interval must be in [1, steps]");
    }
    ScheduleSet set;
    set.total_steps = steps;
    for (int step = static_cast<int>(steps) - 1; step >= 0;
         step -= static_cast<int>(interval)) {
        set.computed.push_back(step);
    }
    std::sort(set.computed.begin(), set.computed.end());
    return set;
}

SampleResult run_uniform(const DitModel& model, const SamplerConfig& config,
                         std::size_t interval, const Tensor& cond) {
    const ScheduleSet set =
        uniform_cache_schedule(config.schedule.steps, interval);
    return run_with_schedule(model, config, set.computed, cond);
}

SampleResult run_reduced_timesteps(const DitModel& model,
                                   const Tensor& x_start,
                                   std::size_t steps_reduced,
                                   double beta_start, double beta_end,
                                   const Tensor& cond) {
    if (steps_reduced < 2) {
        throw BadRange("reduced run needs at least 2 steps");
    }
    const NoiseSchedule schedule =
        linear_beta_schedule(steps_reduced, beta_start, beta_end);

    SampleResult result;
    Tensor x = x_start;
    result.stats.initial_latent_checksum = checksum(x);
    const int steps = static_cast<int>(steps_reduced);
    std::optional<Tensor> prev_output;
    for (int step = steps - 1; step >= 0; --step) {
        const TimestepEmbedding emb = model.timestep_embedding(step);
        Tensor output = model.forward(x, emb, cond);
        result.stats.computed_steps += 1;
        result.stats.per_step_decisions.push_back(Decision::kRefresh);
        x = denoise_step(x, output, static_cast<std::size_t>(step) + 1,
                         schedule);
        prev_output = std::move(output);
    }
    result.final_latent = std::move(x);
    result.stats.total_model_evals = result.stats.computed_steps;
    result.stats.flops_proxy =
        result.stats.total_model_evals * model.config().flops_per_eval();
    return result;
}

ScheduleSet oracle_schedule(const std::vector<double>& output_diffs,
                            double delta) {
    const std::size_t steps = output_diffs.size() + 1;
    ScheduleSet set;
    set.total_steps = steps;
    set.computed.push_back(static_cast<int>(steps) - 1);
    double accumulator = 0.0;
    for (std::size_t j = 0; j < output_diffs.size(); ++j) {
        const int step = static_cast<int>(steps) - 2 - static_cast<int>(j);
        const double tentative = accumulator + output_diffs[j];
        if (tentative <= delta) {
            accumulator = tentative;
        } else {
            set.computed.push_back(step);
            accumulator = 0.0;
        }
    }
    std::sort(set.computed.begin(), set.computed.end());
    return set;
}

ScheduleSet computed_schedule(const RunStats& stats, std::size_t steps) {
    ScheduleSet set;
    set.total_steps = steps;
    for (std::size_t j = 0; j < stats.per_step_decisions.size(); ++j) {
        if (stats.per_step_decisions[j] == Decision::kRefresh) {
            set.computed.push_back(static_cast<int>(steps) - 1 -
                                   static_cast<int>(j));
        }
    }
    std::sort(set.computed.begin(), set.computed.end());
    return set;
}

}  // namespace ditcache
