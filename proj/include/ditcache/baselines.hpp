#ifndef DITCACHE_BASELINES_HPP_
#define DITCACHE_BASELINES_HPP_

#include <cstddef>
#include <vector>

#include "ditcache/sampler.hpp"

namespace ditcache {

// Ordered set of step indices that run the model; everything else reuses.
struct ScheduleSet {
    std::size_t total_steps = 0;
    std::vector<int> computed;  // ascending step indices in [0, T-1]

    bool contains(int step) const;
};

// Fixed-interval schedule: steps T-1, T-1-k, T-1-2k, ... Throws BadInterval
// unless 1 <= interval <= steps.
ScheduleSet uniform_cache_schedule(std::size_t steps, std::size_t interval);

// Residual-reuse run on the fixed uniform schedule; identical reuse
// mechanics to the adaptive policy, only the step selection differs.
SampleResult run_uniform(const DitModel& model, const SamplerConfig& config,
                         std::size_t interval, const Tensor& cond);

// Uncached run on a coarser schedule spanning the same beta range, started
// from the caller's initial latent.
SampleResult run_reduced_timesteps(const DitModel& model, const Tensor& x_start,
                                   std::size_t steps_reduced, double beta_start,
                                   double beta_end, const Tensor& cond);

// The accumulate-and-decide recursion applied to true output differences
// (execution order, length T-1): the upper-bound schedule an indicator
// tries to approximate.
ScheduleSet oracle_schedule(const std::vector<double>& output_diffs,
                            double delta);

// Computed-step set recovered from a run's per-step decisions.
ScheduleSet computed_schedule(const RunStats& stats, std::size_t steps);

}  // namespace ditcache

#endif  // DITCACHE_BASELINES_HPP_
