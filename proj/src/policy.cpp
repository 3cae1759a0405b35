#include "ditcache/policy.hpp"

#include <algorithm>
#include <utility>

#include "ditcache/errors.hpp"

namespace ditcache {

const char* indicator_mode_name(IndicatorMode mode) {
    switch (mode) {
        case IndicatorMode::kTimestepEmbedding:
            return "timestep_embedding";
        case IndicatorMode::kNoisyInput:
            return "noisy_input";
        case IndicatorMode::kModulatedInput:
            return "modulated_input";
    }
    return "unknown";
}

IndicatorMode parse_indicator_mode(const std::string& name) {
    if (name == "timestep_embedding") return IndicatorMode::kTimestepEmbedding;
    if (name == "noisy_input") return IndicatorMode::kNoisyInput;
    if (name == "modulated_input") return IndicatorMode::kModulatedInput;
    throw ConfigError("unknown indicator mode: " + name);
}

Tensor indicator_value(const DitModel& model, const Tensor& x_t, int t,
                       const Tensor& cond, IndicatorMode mode) {
    switch (mode) {
        case IndicatorMode::kTimestepEmbedding:
            return model.timestep_embedding(t).vector;
        case IndicatorMode::kNoisyInput:
            return x_t;  // value copy, no aliasing with the caller's latent
        case IndicatorMode::kModulatedInput: {
            const TimestepEmbedding emb = model.timestep_embedding(t);
            return model.first_block_modulated_input(x_t, emb, cond).tensor;
        }
    }
    throw Error("indicator_value: unreachable mode");
}

DecisionDetail accumulate_and_decide_detail(CacheState& state,
                                            const Tensor& indicator,
                                            const PolicyConfig& config) {
    DecisionDetail detail;
    if (!state.prev_indicator.has_value()) {
        state.prev_indicator = indicator;
        detail.decision = Decision::kRefresh;
        detail.accumulator_after = state.accumulator;
        return detail;
    }

    const double diff = rel_l1_distance(indicator, *state.prev_indicator);
    double rescaled = diff;
    if (config.rescaler.has_value()) {
        // Fitted polynomials can dip below zero outside the calibration
        // range; the accumulator models nonnegative drift, so clamp.
        rescaled = std::max(0.0, evaluate(*config.rescaler, diff));
    }
    const double tentative = state.accumulator + rescaled;
    detail.indicator_diff = diff;
    detail.rescaled_diff = rescaled;
    if (tentative <= config.delta) {
        detail.decision = Decision::kReuse;
        state.accumulator = tentative;
    } else {
        detail.decision = Decision::kRefresh;
        state.accumulator = 0.0;
    }
    detail.accumulator_after = state.accumulator;
    state.prev_indicator = indicator;
    return detail;
}

Tensor compute_and_cache(const DitModel& model, const Tensor& x_t,
                         const TimestepEmbedding& emb, const Tensor& cond,
                         CacheState& state, int step) {
    Tensor output = model.forward(x_t, emb, cond);
    state.cached_residual = sub(output, x_t);
    state.cached_base = x_t;
    state.cached_output = output;
    state.last_computed_step = step;
    return output;
}

Tensor apply_cached(const Tensor& x_t, const CacheState& state) {
    if (!state.cached_residual.has_value()) {
        throw NoCachedResidual("reuse requested before any computed step");
    }
    if (state.cached_base.has_value() &&
        bitwise_equal(x_t, *state.cached_base)) {
        return *state.cached_output;
    }
    return add(x_t, *state.cached_residual);
}

}  // namespace ditcache
