#ifndef DITCACHE_SAMPLER_HPP_
#define DITCACHE_SAMPLER_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "ditcache/model.hpp"
#include "ditcache/policy.hpp"
#include "ditcache/schedule.hpp"

namespace ditcache {

struct SamplerConfig {
    NoiseSchedule schedule;
    std::uint64_t noise_seed = 0;
    bool record_trajectory = false;
};

struct StepRecord {
    int step = 0;  // sampler step index, T-1 first
    Decision decision = Decision::kRefresh;
    std::optional<double> indicator_diff;
    std::optional<double> rescaled_diff;
    double accumulator = 0.0;
    // Distance between this step's true output and the previous computed
    // one; only measurable on computed steps after the first.
    std::optional<double> true_output_diff;
    Tensor latent;  // x at step start
    Tensor output;  // model output, or the reuse estimate
};

struct SampleTrajectory {
    std::vector<StepRecord> records;
};

struct SampleResult {
    Tensor final_latent;
    RunStats stats;
    std::optional<SampleTrajectory> trajectory;
};

// Standard normal latent [token_count, channel_dim] from the counter
// stream seeded with noise_seed.
Tensor draw_initial_latent(const ModelConfig& config, std::uint64_t noise_seed);

// Policy-free run: every step computes. When trace_mode is set, per-step
// indicator differences for that mode are recorded into the trajectory so
// calibration can pair them with the true output differences.
SampleResult run_baseline(const DitModel& model, const SamplerConfig& config,
                          const Tensor& cond,
                          std::optional<IndicatorMode> trace_mode = {});

// Reverse loop with the caching policy deciding refresh vs reuse at every
// step. Step T-1 always computes (no previous indicator exists).
SampleResult run_sampler(const DitModel& model, const SamplerConfig& config,
                         const PolicyConfig& policy, const Tensor& cond);

// Reverse loop that computes exactly at the given step set and reuses the
// cached residual elsewhere. The set must contain step T-1.
SampleResult run_with_schedule(const DitModel& model,
                               const SamplerConfig& config,
                               const std::vector<int>& computed_steps,
                               const Tensor& cond);

// One CSV row per step: t, decision, indicator_diff, rescaled_diff,
// accumulator, true_output_diff (blank where not measured).
void write_trajectory_csv(std::ostream& out, const SampleTrajectory& traj);

}  // namespace ditcache

#endif  // DITCACHE_SAMPLER_HPP_
