#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "csoc/game.hpp"
#include "csoc/metrics.hpp"

namespace csoc {

inline const char* band_color(Band b) {
    switch (b) {
        case Band::Green: return "#2e8b57";
        case Band::Yellow: return "#e6b800";
        case Band::Orange: return "#ff8c00";
        case Band::Red: return "#d62728";
    }
    return "#000000";
}

// Hour-by-hour backlog line, each segment colored by the band of its
// end-of-hour backlog, with the 2h/3h/4h thresholds drawn across.
inline void write_worst_run_svg(const std::string& path, const RunTrace& trace,
                                const BandBoundaries& bb, const std::string& title) {
    if (trace.hours.empty()) throw std::invalid_argument("svg: empty trace");
    const double width = 940.0, height = 420.0;
    const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 45.0;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    long long y_max = trace.max_backlog;
    y_max = std::max(y_max, static_cast<long long>(bb.backlog_at_hours(4.0) * 1.05));
    const int n = static_cast<int>(trace.hours.size());

    auto x_at = [&](double hour) { return ml + plot_w * hour / static_cast<double>(n); };
    auto y_at = [&](double backlog) {
        return mt + plot_h * (1.0 - backlog / static_cast<double>(y_max));
    };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "' viewBox='0 0 " << width << " " << height << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << ml << "' y='24' font-family='sans-serif' font-size='16'>" << title
        << "</text>\n";

    // band threshold guides
    for (double hours : {2.0, 3.0, 4.0}) {
        const double b = bb.backlog_at_hours(hours);
        if (b > static_cast<double>(y_max)) continue;
        svg << "<line x1='" << ml << "' y1='" << y_at(b) << "' x2='" << (ml + plot_w)
            << "' y2='" << y_at(b) << "' stroke='#999' stroke-dasharray='5,4'/>\n";
        svg << "<text x='" << (ml + plot_w - 28) << "' y='" << (y_at(b) - 4)
            << "' font-family='sans-serif' font-size='11' fill='#555'>" << hours
            << "h</text>\n";
    }

    // axes
    svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << (mt + plot_h)
        << "' stroke='black'/>\n";
    svg << "<line x1='" << ml << "' y1='" << (mt + plot_h) << "' x2='" << (ml + plot_w)
        << "' y2='" << (mt + plot_h) << "' stroke='black'/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const long long b = y_max * tick / 4;
        svg << "<text x='" << (ml - 8) << "' y='" << (y_at(static_cast<double>(b)) + 4)
            << "' text-anchor='end' font-family='sans-serif' font-size='11'>" << b
            << "</text>\n";
    }
    for (int tick = 0; tick <= 6; ++tick) {
        const int hour = n * tick / 6;
        svg << "<text x='" << x_at(hour) << "' y='" << (mt + plot_h + 18)
            << "' text-anchor='middle' font-family='sans-serif' font-size='11'>" << hour
            << "</text>\n";
    }
    svg << "<text x='" << (ml + plot_w / 2) << "' y='" << (height - 8)
        << "' text-anchor='middle' font-family='sans-serif' font-size='12'>hour</text>\n";
    svg << "<text x='16' y='" << (mt + plot_h / 2)
        << "' font-family='sans-serif' font-size='12' transform='rotate(-90 16 "
        << (mt + plot_h / 2) << ")'>backlog</text>\n";

    // trace segments colored by the end-of-hour band
    double prev_x = x_at(0);
    double prev_y = y_at(static_cast<double>(trace.initial_backlog));
    for (int i = 0; i < n; ++i) {
        const auto& h = trace.hours[static_cast<std::size_t>(i)];
        const double x = x_at(i + 1);
        const double y = y_at(static_cast<double>(h.backlog_post));
        svg << "<line x1='" << prev_x << "' y1='" << prev_y << "' x2='" << x << "' y2='" << y
            << "' stroke='" << band_color(backlog_band(h.backlog_post, bb))
            << "' stroke-width='1.6'/>\n";
        prev_x = x;
        prev_y = y;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << svg.str();
}

// Donut of the four band proportions with a percentage legend.
inline void write_proportions_svg(const std::string& path,
                                  const std::array<double, 4>& proportions,
                                  const std::string& title) {
    constexpr double kPi = 3.14159265358979323846;
    const double width = 460.0, height = 320.0;
    const double cx = 150.0, cy = 170.0, outer = 110.0, inner = 55.0;

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "' viewBox='0 0 " << width << " " << height << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='20' y='26' font-family='sans-serif' font-size='16'>" << title
        << "</text>\n";

    auto point = [&](double radius, double angle) {
        return std::make_pair(cx + radius * std::cos(angle), cy + radius * std::sin(angle));
    };

    double angle = -kPi / 2.0;
    for (int band = 0; band < 4; ++band) {
        const double p = proportions[static_cast<std::size_t>(band)];
        if (p <= 0.0) continue;
        const char* color = band_color(static_cast<Band>(band));
        if (p >= 1.0 - 1e-12) {
            // full ring
            svg << "<circle cx='" << cx << "' cy='" << cy << "' r='"
                << (outer + inner) / 2.0 << "' fill='none' stroke='" << color
                << "' stroke-width='" << (outer - inner) << "'/>\n";
            break;
        }
        const double sweep = p * 2.0 * kPi;
        const double a0 = angle, a1 = angle + sweep;
        const int large = sweep > kPi ? 1 : 0;
        const auto [ox0, oy0] = point(outer, a0);
        const auto [ox1, oy1] = point(outer, a1);
        const auto [ix0, iy0] = point(inner, a0);
        const auto [ix1, iy1] = point(inner, a1);
        svg << "<path d='M " << ox0 << ' ' << oy0 << " A " << outer << ' ' << outer
            << " 0 " << large << " 1 " << ox1 << ' ' << oy1 << " L " << ix1 << ' ' << iy1
            << " A " << inner << ' ' << inner << " 0 " << large << " 0 " << ix0 << ' ' << iy0
            << " Z' fill='" << color << "'/>\n";
        angle = a1;
    }

    const char* labels[4] = {"green (1-2h)", "yellow (2-3h)", "orange (3-4h)", "red (>4h)"};
    for (int band = 0; band < 4; ++band) {
        const double y = 90.0 + 36.0 * band;
        char pct[32];
        std::snprintf(pct, sizeof(pct), "%.1f%%", 100.0 * proportions[static_cast<std::size_t>(band)]);
        svg << "<rect x='300' y='" << (y - 12) << "' width='16' height='16' fill='"
            << band_color(static_cast<Band>(band)) << "'/>\n";
        svg << "<text x='324' y='" << y << "' font-family='sans-serif' font-size='13'>"
            << labels[band] << ": " << pct << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << svg.str();
}

} // namespace csoc
