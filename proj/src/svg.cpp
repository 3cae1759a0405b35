#include "ditcache/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

#include "ditcache/report.hpp"

namespace ditcache {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 36.0;
constexpr double kMarginBottom = 48.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                         "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

void SvgPlot::add_series(std::string name, const std::vector<double>& xs,
                         const std::vector<double>& ys) {
    series_.push_back(Series{std::move(name), xs, ys});
}

std::string SvgPlot::render() const {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool have_point = false;
    for (const Series& s : series_) {
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            if (!have_point) {
                x_lo = x_hi = s.xs[i];
                y_lo = y_hi = s.ys[i];
                have_point = true;
            } else {
                x_lo = std::min(x_lo, s.xs[i]);
                x_hi = std::max(x_hi, s.xs[i]);
                y_lo = std::min(y_lo, s.ys[i]);
                y_hi = std::max(y_hi, s.ys[i]);
            }
        }
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double x) {
        return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w;
    };
    const auto py = [&](double y) {
        return kMarginTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
        << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt_px(kWidth / 2) << "\" y=\"20\" "
        << "text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">"
        << title_ << "</text>\n";

    // axes
    out << "<line x1=\"" << fmt_px(kMarginLeft) << "\" y1=\""
        << fmt_px(kMarginTop) << "\" x2=\"" << fmt_px(kMarginLeft)
        << "\" y2=\"" << fmt_px(kHeight - kMarginBottom)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt_px(kMarginLeft) << "\" y1=\""
        << fmt_px(kHeight - kMarginBottom) << "\" x2=\""
        << fmt_px(kWidth - kMarginRight) << "\" y2=\""
        << fmt_px(kHeight - kMarginBottom) << "\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / kTicks;
        const double fy = y_lo + (y_hi - y_lo) * i / kTicks;
        const double tx = px(fx);
        const double ty = py(fy);
        out << "<line x1=\"" << fmt_px(tx) << "\" y1=\""
            << fmt_px(kHeight - kMarginBottom) << "\" x2=\"" << fmt_px(tx)
            << "\" y2=\"" << fmt_px(kHeight - kMarginBottom + 4)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt_px(tx) << "\" y=\""
            << fmt_px(kHeight - kMarginBottom + 18)
            << "\" text-anchor=\"middle\" font-size=\"10\" "
               "font-family=\"sans-serif\">"
            << fmt_tick(fx) << "</text>\n";
        out << "<line x1=\"" << fmt_px(kMarginLeft - 4) << "\" y1=\""
            << fmt_px(ty) << "\" x2=\"" << fmt_px(kMarginLeft) << "\" y2=\""
            << fmt_px(ty) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt_px(kMarginLeft - 8) << "\" y=\""
            << fmt_px(ty + 3)
            << "\" text-anchor=\"end\" font-size=\"10\" "
               "font-family=\"sans-serif\">"
            << fmt_tick(fy) << "</text>\n";
    }
    out << "<text x=\"" << fmt_px(kMarginLeft + plot_w / 2) << "\" y=\""
        << fmt_px(kHeight - 10)
        << "\" text-anchor=\"middle\" font-size=\"12\" "
           "font-family=\"sans-serif\">"
        << x_label_ << "</text>\n";
    out << "<text x=\"14\" y=\"" << fmt_px(kMarginTop + plot_h / 2)
        << "\" text-anchor=\"middle\" font-size=\"12\" "
           "font-family=\"sans-serif\" transform=\"rotate(-90 14 "
        << fmt_px(kMarginTop + plot_h / 2) << ")\">" << y_label_
        << "</text>\n";

    for (std::size_t s = 0; s < series_.size(); ++s) {
        const char* color = kColors[s % (sizeof(kColors) / sizeof(*kColors))];
        std::ostringstream pts;
        for (std::size_t i = 0; i < series_[s].xs.size(); ++i) {
            const double x = series_[s].xs[i];
            const double y = series_[s].ys[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (pts.tellp() > 0) pts << ' ';
            pts << fmt_px(px(x)) << ',' << fmt_px(py(y));
        }
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        const double ly = kMarginTop + 14.0 * static_cast<double>(s);
        out << "<line x1=\"" << fmt_px(kWidth - kMarginRight - 120)
            << "\" y1=\"" << fmt_px(ly) << "\" x2=\""
            << fmt_px(kWidth - kMarginRight - 100) << "\" y2=\"" << fmt_px(ly)
            << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << fmt_px(kWidth - kMarginRight - 96) << "\" y=\""
            << fmt_px(ly + 3)
            << "\" font-size=\"10\" font-family=\"sans-serif\">"
            << series_[s].name << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void SvgPlot::save(const std::string& path) const {
    write_text_file(path, render());
}

}  // namespace ditcache
