#include "ditcache/sampler.hpp"

#include <algorithm>
#include <ostream>
#include <utility>

#include "ditcache/errors.hpp"
#include "ditcache/prng.hpp"
#include "ditcache/report.hpp"

namespace ditcache {

namespace {

void finalize_stats(RunStats& stats, const DitModel& model) {
    stats.total_model_evals = stats.computed_steps;
    stats.flops_proxy =
        stats.total_model_evals * model.config().flops_per_eval();
}

}  // namespace

Tensor draw_initial_latent(const ModelConfig& config,
                           std::uint64_t noise_seed) {
    Tensor x({config.token_count, config.channel_dim});
    CounterRng rng(noise_seed);
    for (std::size_t i = 0; i < x.numel(); ++i) x[i] = rng.next_gaussian();
    return x;
}

SampleResult run_baseline(const DitModel& model, const SamplerConfig& config,
                          const Tensor& cond,
                          std::optional<IndicatorMode> trace_mode) {
    const int steps = static_cast<int>(config.schedule.steps);
    SampleResult result;
    result.stats.noise_seed = config.noise_seed;

    Tensor x = draw_initial_latent(model.config(), config.noise_seed);
    result.stats.initial_latent_checksum = checksum(x);

    const bool keep_trajectory =
        config.record_trajectory || trace_mode.has_value();
    if (keep_trajectory) result.trajectory.emplace();

    std::optional<Tensor> prev_output;
    std::optional<Tensor> prev_indicator;
    for (int step = steps - 1; step >= 0; --step) {
        const TimestepEmbedding emb = model.timestep_embedding(step);
        Tensor output = model.forward(x, emb, cond);
        result.stats.computed_steps += 1;
        result.stats.per_step_decisions.push_back(Decision::kRefresh);

        if (keep_trajectory) {
            StepRecord rec;
            rec.step = step;
            rec.decision = Decision::kRefresh;
            if (trace_mode.has_value()) {
                Tensor indicator =
                    indicator_value(model, x, step, cond, *trace_mode);
                if (prev_indicator.has_value()) {
                    rec.indicator_diff =
                        rel_l1_distance(indicator, *prev_indicator);
                }
                prev_indicator = std::move(indicator);
            }
            if (prev_output.has_value()) {
                rec.true_output_diff = rel_l1_distance(output, *prev_output);
            }
            rec.latent = x;
            rec.output = output;
            result.trajectory->records.push_back(std::move(rec));
        }

        x = denoise_step(x, output, static_cast<std::size_t>(step) + 1,
                         config.schedule);
        prev_output = std::move(output);
    }
    result.final_latent = std::move(x);
    finalize_stats(result.stats, model);
    return result;
}

SampleResult run_sampler(const DitModel& model, const SamplerConfig& config,
                         const PolicyConfig& policy, const Tensor& cond) {
    const int steps = static_cast<int>(config.schedule.steps);
    SampleResult result;
    result.stats.noise_seed = config.noise_seed;

    Tensor x = draw_initial_latent(model.config(), config.noise_seed);
    result.stats.initial_latent_checksum = checksum(x);
    if (config.record_trajectory) result.trajectory.emplace();

    CacheState state;
    std::optional<Tensor> last_computed_output;
    for (int step = steps - 1; step >= 0; --step) {
        const TimestepEmbedding emb = model.timestep_embedding(step);
        const Tensor indicator =
            indicator_value(model, x, step, cond, policy.mode);
        const DecisionDetail detail =
            accumulate_and_decide_detail(state, indicator, policy);

        Tensor output;
        std::optional<double> true_output_diff;
        if (detail.decision == Decision::kRefresh) {
            output = compute_and_cache(model, x, emb, cond, state, step);
            if (last_computed_output.has_value()) {
                true_output_diff =
                    rel_l1_distance(output, *last_computed_output);
            }
            last_computed_output = output;
            result.stats.computed_steps += 1;
        } else {
            output = apply_cached(x, state);
            result.stats.reused_steps += 1;
        }
        result.stats.per_step_decisions.push_back(detail.decision);

        if (config.record_trajectory) {
            StepRecord rec;
            rec.step = step;
            rec.decision = detail.decision;
            rec.indicator_diff = detail.indicator_diff;
            rec.rescaled_diff = detail.rescaled_diff;
            rec.accumulator = detail.accumulator_after;
            rec.true_output_diff = true_output_diff;
            rec.latent = x;
            rec.output = output;
            result.trajectory->records.push_back(std::move(rec));
        }

        x = denoise_step(x, output, static_cast<std::size_t>(step) + 1,
                         config.schedule);
    }
    result.final_latent = std::move(x);
    finalize_stats(result.stats, model);
    return result;
}

SampleResult run_with_schedule(const DitModel& model,
                               const SamplerConfig& config,
                               const std::vector<int>& computed_steps,
                               const Tensor& cond) {
    const int steps = static_cast<int>(config.schedule.steps);
    if (std::find(computed_steps.begin(), computed_steps.end(), steps - 1) ==
        computed_steps.end()) {
        throw BadRange("run_with_schedule: first reverse step must compute");
    }
    SampleResult result;
    result.stats.noise_seed = config.noise_seed;

    Tensor x = draw_initial_latent(model.config(), config.noise_seed);
    result.stats.initial_latent_checksum = checksum(x);
    if (config.record_trajectory) result.trajectory.emplace();

    CacheState state;
    for (int step = steps - 1; step >= 0; --step) {
        const bool compute =
            std::find(computed_steps.begin(), computed_steps.end(), step) !=
            computed_steps.end();
        Tensor output;
        if (compute) {
            const TimestepEmbedding emb = model.timestep_embedding(step);
            output = compute_and_cache(model, x, emb, cond, state, step);
            result.stats.computed_steps += 1;
        } else {
            output = apply_cached(x, state);
            result.stats.reused_steps += 1;
        }
        result.stats.per_step_decisions.push_back(
            compute ? Decision::kRefresh : Decision::kReuse);

        if (config.record_trajectory) {
            StepRecord rec;
            rec.step = step;
            rec.decision = compute ? Decision::kRefresh : Decision::kReuse;
            rec.latent = x;
            rec.output = output;
            result.trajectory->records.push_back(std::move(rec));
        }

        x = denoise_step(x, output, static_cast<std::size_t>(step) + 1,
                         config.schedule);
    }
    result.final_latent = std::move(x);
    finalize_stats(result.stats, model);
    return result;
}

void write_trajectory_csv(std::ostream& out, const SampleTrajectory& traj) {
    out << "t,decision,indicator_diff,rescaled_diff,accumulator,"
           "true_output_diff\n";
    for (const StepRecord& rec : traj.records) {
        out << rec.step << ','
            << (rec.decision == Decision::kRefresh ? "computed" : "reused")
            << ',';
        if (rec.indicator_diff) out << fmt_double(*rec.indicator_diff);
        out << ',';
        if (rec.rescaled_diff) out << fmt_double(*rec.rescaled_diff);
        out << ',' << fmt_double(rec.accumulator) << ',';
        if (rec.true_output_diff) out << fmt_double(*rec.true_output_diff);
        out << '\n';
    }
}

}  // namespace ditcache
