#ifndef DITCACHE_REPORT_HPP_
#define DITCACHE_REPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ditcache {

// Shortest round-trip decimal form (std::to_chars), locale-independent, so
// repeated runs emit byte-identical files. Infinities print as "inf"/"-inf".
std::string fmt_double(double value);

std::string fmt_u64(std::uint64_t value);

double mean(const std::vector<double>& values);
// Population standard deviation; well-defined for a single sample.
double stddev(const std::vector<double>& values);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ditcache

#endif  // DITCACHE_REPORT_HPP_
