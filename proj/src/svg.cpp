#include "rifs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rifs/format.hpp"

namespace rifs {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 400;
constexpr int kMargin = 50;

std::string colour(double t) {
    // Dark blue -> yellow ramp.
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(30 + t * (253 - 30)));
    const int g = static_cast<int>(std::lround(20 + t * (231 - 20)));
    const int b = static_cast<int>(std::lround(90 + t * (37 - 90)));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string fixed(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

} // namespace

std::string heatmap_svg(const std::vector<std::vector<double>>& heatmap) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : heatmap) {
        for (double m : row) {
            if (m > 0.0) {
                lo = std::min(lo, std::log10(m));
                hi = std::max(hi, std::log10(m));
            }
        }
    }
    if (!(hi > lo)) {
        lo = hi - 1.0;
    }
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#10103a\"/>\n";
    const double plot_w = kWidth - 2 * kMargin;
    const double plot_h = kHeight - 2 * kMargin;
    const double cell_h = heatmap.empty() ? 0.0 : plot_h / static_cast<double>(heatmap.size());
    for (std::size_t d = 0; d < heatmap.size(); ++d) {
        const double cell_w = plot_w / static_cast<double>(heatmap[d].size());
        for (std::size_t b = 0; b < heatmap[d].size(); ++b) {
            const double m = heatmap[d][b];
            if (!(m > 0.0)) {
                continue;
            }
            svg << "<rect x=\"" << fixed(kMargin + b * cell_w) << "\" y=\"" << fixed(kMargin + d * cell_h)
                << "\" width=\"" << fixed(cell_w) << "\" height=\"" << fixed(cell_h) << "\" fill=\""
                << colour((std::log10(m) - lo) / (hi - lo)) << "\"/>\n";
        }
    }
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15
        << "\" fill=\"white\" text-anchor=\"middle\" font-size=\"14\">normalized position</text>\n";
    svg << "<text x=\"15\" y=\"" << kHeight / 2 << "\" fill=\"white\" font-size=\"14\" transform=\"rotate(-90 15 "
        << kHeight / 2 << ")\" text-anchor=\"middle\">depth</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string curve_svg(std::span<const double> x, std::span<const double> y, const std::string& x_label,
                      const std::string& y_label) {
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            continue;
        }
        x_lo = std::min(x_lo, x[i]);
        x_hi = std::max(x_hi, x[i]);
        y_lo = std::min(y_lo, y[i]);
        y_hi = std::max(y_hi, y[i]);
    }
    if (!(x_hi > x_lo)) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if (!(y_hi > y_lo)) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    const double plot_w = kWidth - 2 * kMargin;
    const double plot_h = kHeight - 2 * kMargin;
    auto px = [&](double v) { return kMargin + (v - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double v) { return kHeight - kMargin - (v - y_lo) / (y_hi - y_lo) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            svg << fixed(px(x[i])) << ',' << fixed(py(y[i])) << ' ';
        }
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 30 << "\" font-size=\"11\">" << format_double(x_lo)
        << "</text>\n";
    svg << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - 30
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(x_hi) << "</text>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\" font-size=\"14\">"
        << x_label << "</text>\n";
    svg << "<text x=\"15\" y=\"" << kHeight / 2 << "\" font-size=\"14\" transform=\"rotate(-90 15 " << kHeight / 2
        << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace rifs
