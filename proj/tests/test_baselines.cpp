#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ditcache/baselines.hpp"
#include "ditcache/config.hpp"
#include "ditcache/errors.hpp"
#include "ditcache/metrics.hpp"
#include "ditcache/prng.hpp"

using namespace ditcache;

namespace {

SamplerConfig reference_sampler(std::uint64_t seed) {
    SamplerConfig cfg;
    cfg.schedule = linear_beta_schedule(30, 0.01, 0.2);
    cfg.noise_seed = seed;
    return cfg;
}

// Frozen from the first verified build: PSNR of the interval-2 uniform run
// against the uncached baseline (reference config, seed 101).
constexpr double kUniformPsnr = 37.211357617744149;

}  // namespace

TEST_CASE("uniform_cache_schedule enumeration") {
    const ScheduleSet every = uniform_cache_schedule(10, 1);
    CHECK(every.computed.size() == 10);

    const ScheduleSet sparse = uniform_cache_schedule(10, 3);
    CHECK(sparse.computed == std::vector<int>{0, 3, 6, 9});

    const ScheduleSet single = uniform_cache_schedule(10, 10);
    CHECK(single.computed == std::vector<int>{9});

    CHECK_THROWS_AS(uniform_cache_schedule(10, 0), BadInterval);
    CHECK_THROWS_AS(uniform_cache_schedule(10, 11), BadInterval);
}

TEST_CASE("run_uniform interval one equals the baseline bitwise") {
    const DitModel model(ModelConfig{});
    const Tensor cond = make_cond(model.config(), 7);
    const SamplerConfig cfg = reference_sampler(101);
    const SampleResult baseline = run_baseline(model, cfg, cond);
    const SampleResult uniform = run_uniform(model, cfg, 1, cond);
    CHECK(bitwise_equal(baseline.final_latent, uniform.final_latent));
    CHECK(uniform.stats.computed_steps == 30);
}

TEST_CASE("run_uniform bookkeeping matches the schedule") {
    const DitModel model(ModelConfig{});
    const Tensor cond = make_cond(model.config(), 7);
    for (std::size_t interval : {2UL, 3UL, 7UL, 30UL}) {
        const SampleResult result =
            run_uniform(model, reference_sampler(101), interval, cond);
        const ScheduleSet expected = uniform_cache_schedule(30, interval);
        CHECK(result.stats.computed_steps == expected.computed.size());
        CHECK(computed_schedule(result.stats, 30).computed ==
              expected.computed);
    }
}

TEST_CASE("run_uniform interval-2 quality anchor") {
    const DitModel model(ModelConfig{});
    const Tensor cond = make_cond(model.config(), 7);
    const SampleResult baseline =
        run_baseline(model, reference_sampler(101), cond);
    const SampleResult uniform =
        run_uniform(model, reference_sampler(101), 2, cond);
    const QualityReport q =
        compare_latents(uniform.final_latent, baseline.final_latent);
    CHECK(q.psnr == doctest::Approx(kUniformPsnr).epsilon(1e-9));
}

TEST_CASE("run_reduced_timesteps bookkeeping and full-length equivalence") {
    const DitModel model(ModelConfig{});
    const Tensor cond = make_cond(model.config(), 7);
    const SamplerConfig cfg = reference_sampler(101);
    const Tensor x_start = draw_initial_latent(model.config(), 101);

    const SampleResult baseline = run_baseline(model, cfg, cond);
    const SampleResult same =
        run_reduced_timesteps(model, x_start, 30, 0.01, 0.2, cond);
    CHECK(bitwise_equal(baseline.final_latent, same.final_latent));

    const SampleResult half =
        run_reduced_timesteps(model, x_start, 15, 0.01, 0.2, cond);
    CHECK(half.stats.computed_steps == 15);
    CHECK(half.stats.total_model_evals == 15);

    CHECK_THROWS_AS(run_reduced_timesteps(model, x_start, 1, 0.01, 0.2, cond),
                    BadRange);
}

TEST_CASE("oracle_schedule hand cases") {
    SUBCASE("delta zero computes everything") {
        const ScheduleSet set = oracle_schedule({0.5, 0.1, 0.2}, 0.0);
        CHECK(set.computed == std::vector<int>{0, 1, 2, 3});
    }
    SUBCASE("all-zero differences compute only the first step") {
        const ScheduleSet set = oracle_schedule({0.0, 0.0, 0.0}, 0.1);
        CHECK(set.computed == std::vector<int>{3});
    }
    SUBCASE("accumulation example: first and fourth steps") {
        const ScheduleSet set = oracle_schedule({0.05, 0.04, 0.03}, 0.1);
        CHECK(set.computed == std::vector<int>{0, 3});
    }
}

// The oracle recursion and the policy recursion are the same rule; feeding
// both the same stream must give the same schedule.
TEST_CASE("oracle agrees with the policy on identical streams") {
    CounterRng rng(4001);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t len = 2 + (rng.next_u64() % 40);
        std::vector<double> diffs(len - 1);
        for (auto& d : diffs) d = rng.next_uniform(0.0, 0.3);
        const double delta = rng.next_uniform(0.0, 0.5);

        PolicyConfig config;
        config.delta = delta;
        CacheState state;
        std::vector<int> policy_computed;
        double value = 1.0;
        Tensor indicator = Tensor::vec({value});
        if (accumulate_and_decide(state, indicator, config) ==
            Decision::kRefresh) {
            policy_computed.push_back(static_cast<int>(len) - 1);
        }
        std::vector<double> realized;
        for (std::size_t j = 0; j < diffs.size(); ++j) {
            const double next = value * (1.0 + diffs[j]);
            realized.push_back(std::abs(next - value) / std::abs(value));
            value = next;
            if (accumulate_and_decide(state, Tensor::vec({value}), config) ==
                Decision::kRefresh) {
                policy_computed.push_back(static_cast<int>(len) - 2 -
                                          static_cast<int>(j));
            }
        }
        std::sort(policy_computed.begin(), policy_computed.end());

        const ScheduleSet oracle = oracle_schedule(realized, delta);
        CHECK(oracle.computed == policy_computed);
    }
}
