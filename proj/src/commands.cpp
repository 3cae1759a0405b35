#include "ditcache/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>

#include "ditcache/baselines.hpp"
#include "ditcache/calibration.hpp"
#include "ditcache/errors.hpp"
#include "ditcache/metrics.hpp"
#include "ditcache/report.hpp"
#include "ditcache/svg.hpp"

namespace ditcache {

namespace {

constexpr char kReportHeader[] =
    "seed,method,delta,mode,order,computed_steps,speedup,psnr_db,ssim,"
    "rel_l1,jaccard_oracle";

struct SeedOutcome {
    std::uint64_t seed = 0;
    std::string method;
    std::optional<double> delta;
    std::string mode;              // empty for the baseline
    std::optional<std::size_t> order;  // empty for identity rescaling
    std::size_t computed_steps = 0;
    double speedup = 1.0;
    double psnr_db = 0.0;
    double ssim_value = 0.0;
    double rel_l1 = 0.0;
    std::optional<double> jaccard;
};

std::string outcome_to_row(const SeedOutcome& o) {
    std::ostringstream row;
    row << fmt_u64(o.seed) << ',' << o.method << ',';
    if (o.delta) row << fmt_double(*o.delta);
    row << ',' << o.mode << ',';
    if (o.order) row << *o.order;
    row << ',' << o.computed_steps << ',' << fmt_double(o.speedup) << ','
        << fmt_double(o.psnr_db) << ',' << fmt_double(o.ssim_value) << ','
        << fmt_double(o.rel_l1) << ',';
    if (o.jaccard) row << fmt_double(*o.jaccard);
    return row.str();
}

std::vector<double> baseline_output_diffs(const SampleTrajectory& traj) {
    std::vector<double> diffs;
    for (std::size_t j = 1; j < traj.records.size(); ++j) {
        diffs.push_back(*traj.records[j].true_output_diff);
    }
    return diffs;
}

SeedOutcome baseline_outcome(std::uint64_t seed, std::size_t steps) {
    SeedOutcome o;
    o.seed = seed;
    o.method = "baseline";
    o.computed_steps = steps;
    o.speedup = 1.0;
    o.psnr_db = std::numeric_limits<double>::infinity();
    o.ssim_value = 1.0;
    o.rel_l1 = 0.0;
    return o;
}

SeedOutcome policy_outcome(std::uint64_t seed, const ExperimentConfig& config,
                           const PolicyConfig& policy,
                           const SampleResult& policy_result,
                           const SampleResult& baseline_result) {
    SeedOutcome o;
    o.seed = seed;
    o.method = "adaptive";
    o.delta = policy.delta;
    o.mode = indicator_mode_name(policy.mode);
    if (policy.rescaler) o.order = policy.rescaler->order();
    o.computed_steps = policy_result.stats.computed_steps;
    o.speedup = speedup_ratio(policy_result.stats, config.schedule.steps);
    const QualityReport quality = compare_latents(
        policy_result.final_latent, baseline_result.final_latent);
    o.psnr_db = quality.psnr;
    o.ssim_value = quality.ssim;
    o.rel_l1 = quality.rel_l1;
    const ScheduleSet oracle = oracle_schedule(
        baseline_output_diffs(*baseline_result.trajectory), policy.delta);
    const ScheduleSet actual =
        computed_schedule(policy_result.stats, config.schedule.steps);
    o.jaccard = schedule_jaccard(actual, oracle);
    return o;
}

PolicyConfig make_policy(const ExperimentConfig& config) {
    PolicyConfig policy;
    policy.delta = config.delta;
    policy.mode = config.mode;
    if (!config.rescaler_path.empty()) {
        try {
            policy.rescaler = load_rescaler(config.rescaler_path);
        } catch (const IoError&) {
            throw MissingRescaler("rescaler file not found: " +
                                  config.rescaler_path);
        }
    }
    return policy;
}

void ensure_output_dir(const ExperimentConfig& config) {
    std::filesystem::create_directories(config.output_dir);
}

std::string out_path(const ExperimentConfig& config, const std::string& name) {
    return (std::filesystem::path(config.output_dir) / name).string();
}

void say(const CommandOptions& opts, const std::string& line) {
    if (!opts.quiet) std::printf("%s\n", line.c_str());
}

TraceProvenance pooled_provenance(const DitModel& model,
                                  const ExperimentConfig& config) {
    TraceProvenance prov;
    prov.model_id = model.config().id_string();
    prov.schedule_id = config.schedule.build().id_string();
    prov.mode = config.mode;
    return prov;
}

// Policy + matching baseline for every seed; rows come back sorted by
// (seed, method) so parallel execution order never shows in the files.
std::vector<SeedOutcome> evaluate_seeds(const DitModel& model,
                                        const ExperimentConfig& config,
                                        const PolicyConfig& policy,
                                        const Tensor& cond,
                                        bool include_baseline_rows) {
    const std::vector<std::uint64_t>& seeds = config.run_seeds;
    std::vector<SeedOutcome> policy_rows(seeds.size());
    std::vector<SeedOutcome> baseline_rows(seeds.size());
    std::string worker_error;  // exceptions must not cross the omp region

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(seeds.size());
         ++i) {
        try {
            SamplerConfig sampler_cfg;
            sampler_cfg.schedule = config.schedule.build();
            sampler_cfg.noise_seed = seeds[i];
            sampler_cfg.record_trajectory = true;  // oracle needs output diffs
            const SampleResult baseline =
                run_baseline(model, sampler_cfg, cond);

            SamplerConfig policy_cfg = sampler_cfg;
            policy_cfg.record_trajectory = false;  // cmd_run dumps separately
            const SampleResult cached =
                run_sampler(model, policy_cfg, policy, cond);

            policy_rows[i] =
                policy_outcome(seeds[i], config, policy, cached, baseline);
            baseline_rows[i] =
                baseline_outcome(seeds[i], config.schedule.steps);
        } catch (const std::exception& e) {
#pragma omp critical
            worker_error = e.what();
        }
    }
    if (!worker_error.empty()) throw Error("seed run failed: " + worker_error);

    std::vector<SeedOutcome> rows;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (include_baseline_rows) rows.push_back(baseline_rows[i]);
        rows.push_back(policy_rows[i]);
    }
    std::sort(rows.begin(), rows.end(),
              [](const SeedOutcome& a, const SeedOutcome& b) {
                  if (a.seed != b.seed) return a.seed < b.seed;
                  return a.method < b.method;
              });
    return rows;
}

}  // namespace

int cmd_calibrate(const ExperimentConfig& config, const CommandOptions& opts) {
    ensure_output_dir(config);
    const DitModel model(config.model);
    const Tensor cond = make_cond(config.model, config.cond_seed);

    SamplerConfig sampler_cfg;
    sampler_cfg.schedule = config.schedule.build();

    const std::vector<DiffTrace> traces = record_trace(
        model, sampler_cfg, config.mode, config.calibrate_seeds, cond);
    for (const DiffTrace& trace : traces) {
        write_text_file(out_path(config, "trace_seed" +
                                             fmt_u64(trace.provenance
                                                         .noise_seed) +
                                             ".csv"),
                        trace_to_csv(trace));
    }

    const PolyRescaler fitted =
        fit_polynomial(traces, config.calibrate_order);
    save_rescaler(out_path(config, "rescaler.txt"), fitted,
                  pooled_provenance(model, config));

    const double fit_rmse = fit_residual(fitted, traces);
    const double identity_rmse =
        fit_residual(PolyRescaler::identity(), traces);
    say(opts, "calibrate: order=" + std::to_string(config.calibrate_order) +
                  " fit_rmse=" + fmt_double(fit_rmse) +
                  " identity_rmse=" + fmt_double(identity_rmse));
    say(opts, "calibrate: wrote " + out_path(config, "rescaler.txt") + " and " +
                  std::to_string(traces.size()) + " trace files");
    return 0;
}

int cmd_run(const ExperimentConfig& config, const CommandOptions& opts) {
    ensure_output_dir(config);
    const DitModel model(config.model);
    const Tensor cond = make_cond(config.model, config.cond_seed);
    const PolicyConfig policy = make_policy(config);

    const std::vector<SeedOutcome> rows =
        evaluate_seeds(model, config, policy, cond, true);

    std::ostringstream csv;
    csv << kReportHeader << '\n';
    for (const SeedOutcome& row : rows) csv << outcome_to_row(row) << '\n';
    write_text_file(out_path(config, "report.csv"), csv.str());

    if (config.record_trajectory) {
        for (std::uint64_t seed : config.run_seeds) {
            SamplerConfig sampler_cfg;
            sampler_cfg.schedule = config.schedule.build();
            sampler_cfg.noise_seed = seed;
            sampler_cfg.record_trajectory = true;
            const SampleResult cached =
                run_sampler(model, sampler_cfg, policy, cond);
            std::ostringstream traj;
            write_trajectory_csv(traj, *cached.trajectory);
            write_text_file(out_path(config, "trajectory_seed" +
                                                 fmt_u64(seed) + ".csv"),
                            traj.str());
        }
    }

    say(opts, "run: wrote " + out_path(config, "report.csv") + " (" +
                  std::to_string(rows.size()) + " rows)");
    return 0;
}

int cmd_sweep(const ExperimentConfig& config, const CommandOptions& opts) {
    ensure_output_dir(config);
    const DitModel model(config.model);
    const Tensor cond = make_cond(config.model, config.cond_seed);
    const PolicyConfig base_policy = make_policy(config);

    std::ostringstream csv;
    csv << "delta,mode,order,mean_computed_steps,std_computed_steps,"
           "mean_speedup,mean_psnr_db,std_psnr_db,mean_ssim,mean_rel_l1,"
           "mean_jaccard_oracle\n";

    std::vector<double> grid_speedups;
    std::vector<double> grid_psnrs;
    for (double delta : config.sweep_deltas) {
        PolicyConfig policy = base_policy;
        policy.delta = delta;
        const std::vector<SeedOutcome> rows =
            evaluate_seeds(model, config, policy, cond, false);

        std::vector<double> computed, speedups, psnrs, ssims, rels, jaccards;
        for (const SeedOutcome& row : rows) {
            computed.push_back(static_cast<double>(row.computed_steps));
            speedups.push_back(row.speedup);
            psnrs.push_back(row.psnr_db);
            ssims.push_back(row.ssim_value);
            rels.push_back(row.rel_l1);
            jaccards.push_back(row.jaccard.value_or(1.0));
        }
        csv << fmt_double(delta) << ',' << indicator_mode_name(config.mode)
            << ',';
        if (base_policy.rescaler) csv << base_policy.rescaler->order();
        csv << ',' << fmt_double(mean(computed)) << ','
            << fmt_double(stddev(computed)) << ',' << fmt_double(mean(speedups))
            << ',' << fmt_double(mean(psnrs)) << ',' << fmt_double(stddev(psnrs))
            << ',' << fmt_double(mean(ssims)) << ',' << fmt_double(mean(rels))
            << ',' << fmt_double(mean(jaccards)) << '\n';
        grid_speedups.push_back(mean(speedups));
        grid_psnrs.push_back(mean(psnrs));
    }
    write_text_file(out_path(config, "sweep.csv"), csv.str());

    SvgPlot quality_plot("quality vs speedup", "speedup (evals)",
                         "psnr vs baseline (dB)");
    quality_plot.add_series(indicator_mode_name(config.mode), grid_speedups,
                            grid_psnrs);
    quality_plot.save(out_path(config, "quality_vs_speedup.svg"));

    // Per-step difference curves for the first seed: how the raw and
    // rescaled indicator differences track the true output differences.
    {
        SamplerConfig sampler_cfg;
        sampler_cfg.schedule = config.schedule.build();
        sampler_cfg.noise_seed = config.run_seeds.front();
        const SampleResult traced =
            run_baseline(model, sampler_cfg, cond, config.mode);
        std::vector<double> steps, output_diffs, input_diffs, rescaled_diffs;
        const auto& records = traced.trajectory->records;
        for (std::size_t j = 1; j < records.size(); ++j) {
            steps.push_back(static_cast<double>(records[j].step));
            output_diffs.push_back(*records[j].true_output_diff);
            input_diffs.push_back(*records[j].indicator_diff);
            const double raw = *records[j].indicator_diff;
            rescaled_diffs.push_back(
                base_policy.rescaler
                    ? std::max(0.0, evaluate(*base_policy.rescaler, raw))
                    : raw);
        }
        SvgPlot diff_plot("per-step differences", "step", "relative L1 diff");
        diff_plot.add_series("output", steps, output_diffs);
        diff_plot.add_series("input (raw)", steps, input_diffs);
        diff_plot.add_series("input (rescaled)", steps, rescaled_diffs);
        diff_plot.save(out_path(config, "step_diffs.svg"));
    }

    say(opts, "sweep: wrote " + out_path(config, "sweep.csv") + " (" +
                  std::to_string(config.sweep_deltas.size()) + " deltas)");
    return 0;
}

int cmd_trace_dump(const ExperimentConfig& config,
                   const CommandOptions& opts) {
    ensure_output_dir(config);
    const DitModel model(config.model);
    const Tensor cond = make_cond(config.model, config.cond_seed);
    const PolicyConfig policy = make_policy(config);

    for (std::uint64_t seed : config.run_seeds) {
        SamplerConfig sampler_cfg;
        sampler_cfg.schedule = config.schedule.build();
        sampler_cfg.noise_seed = seed;
        sampler_cfg.record_trajectory = true;
        const SampleResult result =
            run_sampler(model, sampler_cfg, policy, cond);
        std::ostringstream out;
        write_trajectory_csv(out, *result.trajectory);
        write_text_file(
            out_path(config, "trajectory_seed" + fmt_u64(seed) + ".csv"),
            out.str());
    }
    say(opts, "trace-dump: wrote " + std::to_string(config.run_seeds.size()) +
                  " trajectory files to " + config.output_dir);
    return 0;
}

}  // namespace ditcache
