#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace adast::report {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;  // NaN entries are skipped
};

namespace detail {
inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[i % 10];
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}
}  // namespace detail

/// Multi-series line chart with linear axes.
inline std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<Series>& series) {
    const double width = 640, height = 420, left = 70, right = 150, top = 40, bottom = 60;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << detail::escape(title) << "</text>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double yv = y0 + (y1 - y0) * k / 4.0, xv = x0 + (x1 - x0) * k / 4.0;
        svg << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
            << detail::fmt(yv) << "</text>\n"
            << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
            << detail::fmt(xv) << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
        << detail::escape(x_label) << "</text>\n"
        << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << top + ph / 2 << ")\">" << detail::escape(y_label) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::string points;
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].y[i])) continue;
            points += detail::fmt(px(series[s].x[i])) + "," + detail::fmt(py(series[s].y[i])) + " ";
            svg << "<circle cx=\"" << px(series[s].x[i]) << "\" cy=\"" << py(series[s].y[i]) << "\" r=\"3\" fill=\""
                << detail::palette(s) << "\"/>\n";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << detail::palette(s) << "\" stroke-width=\"2\" points=\"" << points
            << "\"/>\n"
            << "<text x=\"" << left + pw + 12 << "\" y=\"" << top + 16 + 18.0 * static_cast<double>(s)
            << "\" font-size=\"12\" fill=\"" << detail::palette(s) << "\">" << detail::escape(series[s].label)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

/// Radar chart: one spoke per axis label, one closed polygon per series (y values only).
inline std::string radar_chart(const std::string& title, const std::vector<std::string>& axes,
                               const std::vector<Series>& series) {
    const double size = 560, cx = 280, cy = 300, radius = 200;
    double vmax = 0.0;
    for (const auto& s : series)
        for (double v : s.y)
            if (std::isfinite(v)) vmax = std::max(vmax, v);
    if (vmax <= 0.0) vmax = 1.0;
    const std::size_t n = axes.size();
    auto angle = [&](std::size_t i) { return -std::numbers::pi / 2 + 2 * std::numbers::pi * double(i) / double(n ? n : 1); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 140 << "\" height=\"" << size + 40
        << "\" viewBox=\"0 0 " << size + 140 << ' ' << size + 40 << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << cx << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << detail::escape(title)
        << "</text>\n";
    for (int ring = 1; ring <= 4; ++ring)
        svg << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << radius * ring / 4.0
            << "\" fill=\"none\" stroke=\"#ccc\"/>\n"
            << "<text x=\"" << cx + 3 << "\" y=\"" << cy - radius * ring / 4.0 << "\" font-size=\"10\" fill=\"#666\">"
            << detail::fmt(vmax * ring / 4.0) << "</text>\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double ex = cx + radius * std::cos(angle(i)), ey = cy + radius * std::sin(angle(i));
        svg << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << ex << "\" y2=\"" << ey
            << "\" stroke=\"#999\"/>\n"
            << "<text x=\"" << cx + (radius + 16) * std::cos(angle(i)) << "\" y=\""
            << cy + (radius + 16) * std::sin(angle(i)) + 4 << "\" text-anchor=\"middle\" font-size=\"11\">"
            << detail::escape(axes[i]) << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::string points;
        for (std::size_t i = 0; i < n && i < series[s].y.size(); ++i) {
            const double v = std::isfinite(series[s].y[i]) ? series[s].y[i] : 0.0;
            const double r = radius * v / vmax;
            points += detail::fmt(cx + r * std::cos(angle(i))) + "," + detail::fmt(cy + r * std::sin(angle(i))) + " ";
        }
        svg << "<polygon fill=\"" << detail::palette(s) << "\" fill-opacity=\"0.12\" stroke=\"" << detail::palette(s)
            << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n"
            << "<text x=\"" << size + 10 << "\" y=\"" << 60 + 18.0 * static_cast<double>(s) << "\" font-size=\"12\" fill=\""
            << detail::palette(s) << "\">" << detail::escape(series[s].label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace adast::report
