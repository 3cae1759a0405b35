#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ditcache/commands.hpp"
#include "ditcache/errors.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string output_dir;
    std::uint64_t seed_override = 0;
    bool have_seed_override = false;
    bool quiet = false;
};

ditcache::ExperimentConfig load_config(const GlobalArgs& args) {
    ditcache::ExperimentConfig config;
    if (!args.config_path.empty()) {
        config = ditcache::parse_config_file(args.config_path);
    }
    if (!args.output_dir.empty()) config.output_dir = args.output_dir;
    if (args.have_seed_override) {
        config.run_seeds = {args.seed_override};
        config.calibrate_seeds = {args.seed_override};
    }
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffusion-transformer residual-cache benchmark"};
    app.require_subcommand(1);

    GlobalArgs args;
    app.add_option("--config", args.config_path, "experiment config file");
    app.add_option("--output", args.output_dir, "output directory override");
    auto* seed_opt = app.add_option("--seed-override", args.seed_override,
                                    "replace every seed list with one seed");
    app.add_flag("--quiet", args.quiet, "suppress progress output");

    auto* calibrate = app.add_subcommand(
        "calibrate", "record difference traces and fit the rescaler");
    auto* run = app.add_subcommand(
        "run", "run baseline and cached sampling, write the report CSV");
    auto* sweep = app.add_subcommand(
        "sweep", "run the delta grid, write aggregate CSV and plots");
    auto* trace_dump = app.add_subcommand(
        "trace-dump", "write per-step trajectory CSVs for the run seeds");

    CLI11_PARSE(app, argc, argv);
    args.have_seed_override = seed_opt->count() > 0;

    try {
        const ditcache::ExperimentConfig config = load_config(args);
        const ditcache::CommandOptions opts{args.quiet};
        if (calibrate->parsed()) return ditcache::cmd_calibrate(config, opts);
        if (run->parsed()) return ditcache::cmd_run(config, opts);
        if (sweep->parsed()) return ditcache::cmd_sweep(config, opts);
        if (trace_dump->parsed()) return ditcache::cmd_trace_dump(config, opts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::fprintf(stderr, "error: no subcommand\n");
    return 1;
}
