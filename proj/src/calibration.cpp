#include "ditcache/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ditcache/errors.hpp"
#include "ditcache/report.hpp"

namespace ditcache {

namespace {

std::vector<DiffTrace::Point> pool_points(
    const std::vector<DiffTrace>& traces) {
    std::vector<DiffTrace::Point> points;
    for (const DiffTrace& trace : traces) {
        points.insert(points.end(), trace.points.begin(), trace.points.end());
    }
    return points;
}

// Gaussian elimination with partial pivoting on a dense (n x n) system.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b,
                                std::size_t n) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::fabs(v));
    const double tiny = std::max(scale, 1.0) * 1e-13;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::fabs(a[row * n + col]) > std::fabs(a[pivot * n + col])) {
                pivot = row;
            }
        }
        if (std::fabs(a[pivot * n + col]) < tiny) {
            throw DegenerateDesign("rank-deficient least-squares system");
        }
        if (pivot != col) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a[col * n + k], a[pivot * n + k]);
            }
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t row = col + 1; row < n; ++row) {
            const double factor = a[row * n + col] / a[col * n + col];
            if (factor == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= a[i * n + k] * x[k];
        x[i] = acc / a[i * n + i];
    }
    return x;
}

double binomial(std::size_t n, std::size_t k) {
    double acc = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        acc = acc * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return acc;
}

}  // namespace

std::vector<DiffTrace> record_trace(const DitModel& model,
                                    const SamplerConfig& base,
                                    IndicatorMode mode,
                                    const std::vector<std::uint64_t>& seeds,
                                    const Tensor& cond) {
    if (seeds.empty()) throw BadRange("record_trace: seeds must be nonempty");
    std::vector<DiffTrace> traces;
    traces.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        SamplerConfig config = base;
        config.noise_seed = seed;
        const SampleResult result = run_baseline(model, config, cond, mode);

        DiffTrace trace;
        trace.provenance.model_id = model.config().id_string();
        trace.provenance.noise_seed = seed;
        trace.provenance.schedule_id = config.schedule.id_string();
        trace.provenance.mode = mode;
        const auto& records = result.trajectory->records;
        for (std::size_t j = 1; j < records.size(); ++j) {
            trace.points.push_back(DiffTrace::Point{
                *records[j].indicator_diff, *records[j].true_output_diff});
        }
        traces.push_back(std::move(trace));
    }
    return traces;
}

PolyRescaler fit_polynomial(const std::vector<DiffTrace>& traces,
                            std::size_t order) {
    const std::vector<DiffTrace::Point> points = pool_points(traces);
    const std::size_t terms = order + 1;
    if (points.size() < terms) {
        throw InsufficientData("need at least order+1 points");
    }

    double x_lo = points[0].x;
    double x_hi = points[0].x;
    for (const auto& p : points) {
        x_lo = std::min(x_lo, p.x);
        x_hi = std::max(x_hi, p.x);
    }
    if (order >= 1 && x_hi == x_lo) {
        throw DegenerateDesign("all x values identical");
    }
    const double span = (x_hi == x_lo) ? 1.0 : x_hi - x_lo;

    // Normal equations over u = (x - x_lo) / span in [0, 1].
    std::vector<double> moments(2 * order + 1, 0.0);
    std::vector<double> rhs(terms, 0.0);
    for (const auto& p : points) {
        const double u = (p.x - x_lo) / span;
        double power = 1.0;
        for (std::size_t k = 0; k < moments.size(); ++k) {
            moments[k] += power;
            if (k < terms) rhs[k] += p.y * power;
            power *= u;
        }
    }
    std::vector<double> gram(terms * terms);
    for (std::size_t i = 0; i < terms; ++i) {
        for (std::size_t j = 0; j < terms; ++j) {
            gram[i * terms + j] = moments[i + j];
        }
    }
    const std::vector<double> scaled = solve_dense(gram, rhs, terms);

    // Map back to raw-x coefficients:
    // u^j = sum_i C(j,i) (-x_lo)^(j-i) x^i / span^j.
    std::vector<double> coefficients(terms, 0.0);
    for (std::size_t j = 0; j < terms; ++j) {
        const double inv_span_j = std::pow(1.0 / span, static_cast<double>(j));
        for (std::size_t i = 0; i <= j; ++i) {
            coefficients[i] += scaled[j] * binomial(j, i) *
                               std::pow(-x_lo, static_cast<double>(j - i)) *
                               inv_span_j;
        }
    }
    return PolyRescaler{std::move(coefficients)};
}

double fit_residual(const PolyRescaler& rescaler,
                    const std::vector<DiffTrace>& traces) {
    const std::vector<DiffTrace::Point> points = pool_points(traces);
    if (points.empty()) throw BadRange("fit_residual: no points");
    double acc = 0.0;
    for (const auto& p : points) {
        const double err = evaluate(rescaler, p.x) - p.y;
        acc += err * err;
    }
    return std::sqrt(acc / static_cast<double>(points.size()));
}

std::string trace_to_csv(const DiffTrace& trace) {
    std::ostringstream out;
    out << "# model=" << trace.provenance.model_id
        << " noise_seed=" << trace.provenance.noise_seed
        << " schedule=" << trace.provenance.schedule_id
        << " mode=" << indicator_mode_name(trace.provenance.mode) << '\n';
    out << "step,x_input_diff,y_output_diff\n";
    for (std::size_t j = 0; j < trace.points.size(); ++j) {
        out << j << ',' << fmt_double(trace.points[j].x) << ','
            << fmt_double(trace.points[j].y) << '\n';
    }
    return out.str();
}

std::string rescaler_to_text(const PolyRescaler& rescaler,
                             const TraceProvenance& provenance) {
    std::ostringstream out;
    out << "# polynomial rescaler\n";
    out << "order = " << rescaler.order() << '\n';
    out << "coefficients =";
    for (double c : rescaler.coefficients) out << ' ' << fmt_double(c);
    out << '\n';
    out << "model = " << provenance.model_id << '\n';
    out << "schedule = " << provenance.schedule_id << '\n';
    out << "mode = " << indicator_mode_name(provenance.mode) << '\n';
    return out.str();
}

PolyRescaler rescaler_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::optional<std::size_t> order;
    std::vector<double> coefficients;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto lo = s.find_first_not_of(" \t");
            const auto hi = s.find_last_not_of(" \t\r");
            s = (lo == std::string::npos) ? "" : s.substr(lo, hi - lo + 1);
        };
        trim(key);
        trim(value);
        if (key == "order") {
            order = static_cast<std::size_t>(std::stoul(value));
        } else if (key == "coefficients") {
            std::istringstream vals(value);
            double c = 0.0;
            while (vals >> c) coefficients.push_back(c);
        }
    }
    if (!order.has_value() || coefficients.size() != *order + 1) {
        throw ConfigError("malformed rescaler file");
    }
    return PolyRescaler{std::move(coefficients)};
}

void save_rescaler(const std::string& path, const PolyRescaler& rescaler,
                   const TraceProvenance& provenance) {
    write_text_file(path, rescaler_to_text(rescaler, provenance));
}

PolyRescaler load_rescaler(const std::string& path) {
    return rescaler_from_text(read_text_file(path));
}

}  // namespace ditcache
