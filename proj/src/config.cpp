#include "ditcache/config.hpp"

#include <charconv>
#include <sstream>

#include "ditcache/errors.hpp"
#include "ditcache/prng.hpp"
#include "ditcache/report.hpp"

namespace ditcache {

namespace {

std::string trim(const std::string& s) {
    const auto lo = s.find_first_not_of(" \t\r");
    if (lo == std::string::npos) return "";
    const auto hi = s.find_last_not_of(" \t\r");
    return s.substr(lo, hi - lo + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": " + value);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t parsed = 0;
    const auto res =
        std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        throw ConfigError("bad integer value for " + key + ": " + value);
    }
    return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("bad boolean value for " + key + ": " + value);
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& key, const std::string& value,
                          Fn&& one) {
    std::vector<T> out;
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(one(key, item));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    model.validate();
    if (schedule.steps < 2) throw ConfigError("schedule.steps must be >= 2");
    if (!(schedule.beta_start > 0.0) ||
        !(schedule.beta_start <= schedule.beta_end) ||
        !(schedule.beta_end < 1.0)) {
        throw ConfigError("schedule betas must satisfy 0 < start <= end < 1");
    }
    if (delta < 0.0) throw ConfigError("policy.delta must be >= 0");
    if (calibrate_seeds.empty() || run_seeds.empty()) {
        throw ConfigError("seed lists must be nonempty");
    }
    if (sweep_deltas.empty()) throw ConfigError("sweep.deltas must be nonempty");
    for (std::size_t i = 0; i < sweep_deltas.size(); ++i) {
        if (sweep_deltas[i] < 0.0) {
            throw ConfigError("sweep deltas must be >= 0");
        }
        if (i > 0 && !(sweep_deltas[i] > sweep_deltas[i - 1])) {
            throw ConfigError("sweep deltas must be strictly increasing");
        }
    }
    if (output_dir.empty()) throw ConfigError("output_dir must be nonempty");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no += 1;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;

        if (full == "model.token_count") {
            config.model.token_count = parse_u64(full, value);
        } else if (full == "model.channel_dim") {
            config.model.channel_dim = parse_u64(full, value);
        } else if (full == "model.hidden_dim") {
            config.model.hidden_dim = parse_u64(full, value);
        } else if (full == "model.num_blocks") {
            config.model.num_blocks = parse_u64(full, value);
        } else if (full == "model.num_heads") {
            config.model.num_heads = parse_u64(full, value);
        } else if (full == "model.cond_dim") {
            config.model.cond_dim = parse_u64(full, value);
        } else if (full == "model.weight_seed") {
            config.model.weight_seed = parse_u64(full, value);
        } else if (full == "model.cond_seed") {
            config.cond_seed = parse_u64(full, value);
        } else if (full == "schedule.steps") {
            config.schedule.steps = parse_u64(full, value);
        } else if (full == "schedule.beta_start") {
            config.schedule.beta_start = parse_double(full, value);
        } else if (full == "schedule.beta_end") {
            config.schedule.beta_end = parse_double(full, value);
        } else if (full == "policy.delta") {
            config.delta = parse_double(full, value);
        } else if (full == "policy.mode") {
            config.mode = parse_indicator_mode(value);
        } else if (full == "policy.rescaler") {
            config.rescaler_path = value;
        } else if (full == "calibrate.order") {
            config.calibrate_order = parse_u64(full, value);
        } else if (full == "calibrate.seeds") {
            config.calibrate_seeds =
                parse_list<std::uint64_t>(full, value, parse_u64);
        } else if (full == "run.seeds") {
            config.run_seeds = parse_list<std::uint64_t>(full, value, parse_u64);
        } else if (full == "run.record_trajectory") {
            config.record_trajectory = parse_bool(full, value);
        } else if (full == "sweep.deltas") {
            config.sweep_deltas = parse_list<double>(full, value, parse_double);
        } else if (full == "output.dir") {
            config.output_dir = value;
        } else {
            throw ConfigError("unknown config key: " + full);
        }
    }
    config.validate();
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

Tensor make_cond(const ModelConfig& config, std::uint64_t cond_seed) {
    Tensor cond({config.cond_dim});
    CounterRng rng(cond_seed);
    for (std::size_t i = 0; i < cond.numel(); ++i) {
        cond[i] = rng.next_gaussian();
    }
    return cond;
}

}  // namespace ditcache
