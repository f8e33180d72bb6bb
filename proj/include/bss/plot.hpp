#pragma once

// Minimal SVG line charts for trajectory files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "bss/adaptive.hpp"

namespace bss {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

inline void write_svg_lines(std::ostream& os, const std::vector<Series>& series, const std::string& title,
                            const std::string& x_label) {
    constexpr double W = 720, H = 420, L = 60, R = 140, T = 40, B = 50;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double yv = ymin + (ymax - ymin) * k / 4.0;
        const double xv = xmin + (xmax - xmin) * k / 4.0;
        os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
        os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << num(xv)
           << "</text>\n";
    }
    if (ymin < 0 && ymax > 0)
        os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << py(0) << "\" y2=\"" << py(0)
           << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label
       << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (std::isfinite(s.y[i])) os << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
        os << "\"/>\n";
        const double ly = T + 16 + 18 * static_cast<double>(k);
        os << "<line x1=\"" << W - R + 10 << "\" x2=\"" << W - R + 30 << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4
           << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R + 36 << "\" y=\"" << ly << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
}

/// Entries of C_t and the non-mixing index against t.
inline void write_trajectory_svg(std::ostream& os, const Trajectory& traj, const std::string& title) {
    static const char* names[4] = {"c11", "c12", "c21", "c22"};
    static const char* colors[5] = {"#1f4fd1", "#e0b000", "#f07020", "#c01fc0", "#222222"};
    std::vector<Series> series(5);
    for (std::size_t k = 0; k < 5; ++k) {
        series[k].label = k < 4 ? names[k] : "index";
        series[k].color = colors[k];
    }
    for (const auto& p : traj.points) {
        for (std::size_t k = 0; k < 4; ++k) {
            series[k].x.push_back(static_cast<double>(p.t));
            series[k].y.push_back(p.C.a[k]);
        }
        series[4].x.push_back(static_cast<double>(p.t));
        series[4].y.push_back(p.index);
    }
    write_svg_lines(os, series, title, "iteration");
}

} // namespace bss
