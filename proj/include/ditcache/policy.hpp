#ifndef DITCACHE_POLICY_HPP_
#define DITCACHE_POLICY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ditcache/model.hpp"
#include "ditcache/rescaler.hpp"
#include "ditcache/tensor.hpp"

namespace ditcache {

enum class IndicatorMode {
    kTimestepEmbedding,
    kNoisyInput,
    kModulatedInput,
};

const char* indicator_mode_name(IndicatorMode mode);
IndicatorMode parse_indicator_mode(const std::string& name);  // ConfigError

struct PolicyConfig {
    double delta = 0.1;
    IndicatorMode mode = IndicatorMode::kModulatedInput;
    std::optional<PolyRescaler> rescaler;  // absent = identity
};

enum class Decision { kRefresh, kReuse };

struct CacheState {
    std::optional<Tensor> cached_residual;  // output minus input, last refresh
    double accumulator = 0.0;
    std::optional<Tensor> prev_indicator;
    std::optional<int> last_computed_step;
    // Exact-replay pair: reusing at the latent the residual was computed
    // from must reproduce that step's true output bitwise, which the
    // rounded residual alone cannot guarantee.
    std::optional<Tensor> cached_base;
    std::optional<Tensor> cached_output;
};

struct RunStats {
    std::size_t computed_steps = 0;
    std::size_t reused_steps = 0;
    std::vector<Decision> per_step_decisions;  // execution order, step T-1 first
    std::size_t total_model_evals = 0;
    std::uint64_t flops_proxy = 0;
    std::uint64_t noise_seed = 0;
    double initial_latent_checksum = 0.0;  // replay anchor
};

// The signal compared across steps. TimestepEmbedding and ModulatedInput
// modes never run the blocks; NoisyInput returns a copy of the latent.
Tensor indicator_value(const DitModel& model, const Tensor& x_t, int t,
                       const Tensor& cond, IndicatorMode mode);

struct DecisionDetail {
    Decision decision = Decision::kRefresh;
    std::optional<double> indicator_diff;  // absent on the first call
    std::optional<double> rescaled_diff;
    double accumulator_after = 0.0;
};

// One step of the accumulated-threshold rule: reuse while the running sum
// of (rescaled, clamped-nonnegative) indicator differences stays <= delta;
// refresh on strict exceedance and reset the sum to zero. The first call
// always refreshes. prev_indicator is replaced on every call.
DecisionDetail accumulate_and_decide_detail(CacheState& state,
                                            const Tensor& indicator,
                                            const PolicyConfig& config);

inline Decision accumulate_and_decide(CacheState& state,
                                      const Tensor& indicator,
                                      const PolicyConfig& config) {
    return accumulate_and_decide_detail(state, indicator, config).decision;
}

// Refresh path: run the model, cache output minus input, return the output.
Tensor compute_and_cache(const DitModel& model, const Tensor& x_t,
                         const TimestepEmbedding& emb, const Tensor& cond,
                         CacheState& state, int step);

// Reuse path: current latent plus the cached residual; never runs the
// model. Throws NoCachedResidual before the first refresh.
Tensor apply_cached(const Tensor& x_t, const CacheState& state);

}  // namespace ditcache

#endif  // DITCACHE_POLICY_HPP_
