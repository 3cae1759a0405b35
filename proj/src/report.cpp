#include "ditcache/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include "ditcache/errors.hpp"

namespace ditcache {

std::string fmt_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string fmt_u64(std::uint64_t value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double mean(const std::vector<double>& values) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

double stddev(const std::vector<double>& values) {
    bool all_finite = true;
    bool all_equal = true;
    for (double v : values) {
        if (!std::isfinite(v)) all_finite = false;
        if (v != values.front()) all_equal = false;
    }
    // infinities (the identical-latents PSNR sentinel) have no spread when
    // they all agree; any mix with them is an infinite spread
    if (!all_finite) {
        return all_equal ? 0.0 : std::numeric_limits<double>::infinity();
    }
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) {
        const double d = v - m;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(values.size()));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ditcache
