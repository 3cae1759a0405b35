#ifndef DITCACHE_COMMANDS_HPP_
#define DITCACHE_COMMANDS_HPP_

#include <string>

#include "ditcache/config.hpp"

namespace ditcache {

struct CommandOptions {
    bool quiet = false;
};

// Verbs behind the CLI. Each writes its artifacts under
// config.output_dir and returns a process exit code; reruns with the same
// config produce byte-identical files.
int cmd_calibrate(const ExperimentConfig& config, const CommandOptions& opts);
int cmd_run(const ExperimentConfig& config, const CommandOptions& opts);
int cmd_sweep(const ExperimentConfig& config, const CommandOptions& opts);
int cmd_trace_dump(const ExperimentConfig& config, const CommandOptions& opts);

}  // namespace ditcache

#endif  // DITCACHE_COMMANDS_HPP_
