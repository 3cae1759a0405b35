#ifndef DITCACHE_CALIBRATION_HPP_
#define DITCACHE_CALIBRATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ditcache/policy.hpp"
#include "ditcache/rescaler.hpp"
#include "ditcache/sampler.hpp"

namespace ditcache {

struct TraceProvenance {
    std::string model_id;
    std::uint64_t noise_seed = 0;
    std::string schedule_id;
    IndicatorMode mode = IndicatorMode::kModulatedInput;
};

// Paired (input difference, output difference) observations from one
// uncached run, ordered by execution step.
struct DiffTrace {
    struct Point {
        double x = 0.0;  // indicator difference between consecutive steps
        double y = 0.0;  // true output difference between the same steps
    };
    std::vector<Point> points;
    TraceProvenance provenance;
};

// One uncached run per seed; every consecutive executed step pair
// contributes one point. Each trace has schedule.steps - 1 points.
std::vector<DiffTrace> record_trace(const DitModel& model,
                                    const SamplerConfig& base,
                                    IndicatorMode mode,
                                    const std::vector<std::uint64_t>& seeds,
                                    const Tensor& cond);

// Least squares over the pooled points of all traces. x values are
// shifted/scaled to [0,1] before the Vandermonde normal equations are
// solved, then the coefficients are mapped back; order-4 fits on narrow x
// ranges are fragile otherwise. Throws InsufficientData when points <
// order+1 and DegenerateDesign on rank-deficient systems.
PolyRescaler fit_polynomial(const std::vector<DiffTrace>& traces,
                            std::size_t order);

// Root-mean-square of f(x) - y over all points of all traces.
double fit_residual(const PolyRescaler& rescaler,
                    const std::vector<DiffTrace>& traces);

// Trace file: provenance comment line, then `step,x_input_diff,y_output_diff`.
std::string trace_to_csv(const DiffTrace& trace);

// Rescaler file: key = value lines (order, coefficients, provenance).
std::string rescaler_to_text(const PolyRescaler& rescaler,
                             const TraceProvenance& provenance);
PolyRescaler rescaler_from_text(const std::string& text);

void save_rescaler(const std::string& path, const PolyRescaler& rescaler,
                   const TraceProvenance& provenance);
PolyRescaler load_rescaler(const std::string& path);

}  // namespace ditcache

#endif  // DITCACHE_CALIBRATION_HPP_
