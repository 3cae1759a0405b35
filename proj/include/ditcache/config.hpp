#ifndef DITCACHE_CONFIG_HPP_
#define DITCACHE_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ditcache/model.hpp"
#include "ditcache/policy.hpp"
#include "ditcache/schedule.hpp"

namespace ditcache {

struct ScheduleSpec {
    std::size_t steps = 30;
    double beta_start = 0.01;
    double beta_end = 0.2;

    NoiseSchedule build() const {
        return linear_beta_schedule(steps, beta_start, beta_end);
    }
};

// Flat [section] key = value experiment description; every field has a
// default so an empty file is a valid reference configuration.
struct ExperimentConfig {
    ModelConfig model;
    ScheduleSpec schedule;
    std::uint64_t cond_seed = 7;

    double delta = 0.1;
    IndicatorMode mode = IndicatorMode::kModulatedInput;
    std::string rescaler_path;  // empty = identity rescaling

    std::size_t calibrate_order = 4;
    std::vector<std::uint64_t> calibrate_seeds = {1, 2, 3, 4, 5, 6, 7, 8};

    std::vector<std::uint64_t> run_seeds = {101, 102, 103, 104, 105,
                                            106, 107, 108, 109, 110};
    bool record_trajectory = false;

    std::vector<double> sweep_deltas = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};

    std::string output_dir = "out";

    void validate() const;  // throws ConfigError
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// The fixed conditioning vector standing in for a constant prompt
// embedding: standard normal draws from cond_seed.
Tensor make_cond(const ModelConfig& config, std::uint64_t cond_seed);

}  // namespace ditcache

#endif  // DITCACHE_CONFIG_HPP_
