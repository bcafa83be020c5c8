#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spmld/errors.hpp"
#include "spmld/metrics.hpp"

namespace spmld {

// Radar chart over the maximized metric axes plus inverted normalized
// coverage. Axes start at 12 o'clock and run clockwise; every axis is
// min-max scaled across the plotted methods and mapped onto [0.1, 1] of the
// radius so a dominated method still draws a visible polygon.

struct RadarSeries {
    std::string name;
    std::vector<double> values;  // one per axis, higher = better
};

namespace detail {

inline std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

inline std::string render_radar_svg(const std::vector<std::string>& axis_labels,
                                    const std::vector<RadarSeries>& series) {
    const std::size_t axes = axis_labels.size();
    if (axes < 3) throw ConfigError("radar: need at least 3 axes");
    if (series.size() < 2) throw ConfigError("radar: need at least 2 methods");
    for (const RadarSeries& s : series)
        if (s.values.size() != axes)
            throw ShapeError("radar: series '" + s.name + "' has the wrong axis count");

    std::vector<double> lo(axes), hi(axes);
    for (std::size_t a = 0; a < axes; ++a) {
        lo[a] = hi[a] = series.front().values[a];
        for (const RadarSeries& s : series) {
            lo[a] = std::min(lo[a], s.values[a]);
            hi[a] = std::max(hi[a], s.values[a]);
        }
    }

    const double width = 640.0;
    const double height = 560.0;
    const double cx = width / 2.0;
    const double cy = 280.0;
    const double radius = 190.0;
    const double pi = 3.14159265358979323846;

    auto angle_of = [&](std::size_t a) {
        return -pi / 2.0 + 2.0 * pi * static_cast<double>(a) / static_cast<double>(axes);
    };
    auto point_at = [&](std::size_t a, double frac) {
        const double ang = angle_of(a);
        return std::pair<double, double>{cx + radius * frac * std::cos(ang),
                                         cy + radius * frac * std::sin(ang)};
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    const std::size_t palette_size = sizeof(palette) / sizeof(palette[0]);

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
       << "\">\n";
    os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (double ring : {0.25, 0.5, 0.75, 1.0}) {
        os << "  <polygon class=\"ring\" fill=\"none\" stroke=\"#cccccc\" points=\"";
        for (std::size_t a = 0; a < axes; ++a) {
            const auto [x, y] = point_at(a, ring);
            os << detail::fmt2(x) << ',' << detail::fmt2(y) << (a + 1 < axes ? " " : "");
        }
        os << "\"/>\n";
    }

    for (std::size_t a = 0; a < axes; ++a) {
        const auto [x, y] = point_at(a, 1.0);
        os << "  <line class=\"axis\" x1=\"" << detail::fmt2(cx) << "\" y1=\""
           << detail::fmt2(cy) << "\" x2=\"" << detail::fmt2(x) << "\" y2=\""
           << detail::fmt2(y) << "\" stroke=\"#888888\"/>\n";
        const auto [lx, ly] = point_at(a, 1.13);
        os << "  <text class=\"axis-label\" x=\"" << detail::fmt2(lx) << "\" y=\""
           << detail::fmt2(ly)
           << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
           << axis_labels[a] << "</text>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % palette_size];
        os << "  <polygon class=\"series\" data-name=\"" << series[s].name
           << "\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"" << color
           << "\" stroke-width=\"2\" points=\"";
        for (std::size_t a = 0; a < axes; ++a) {
            const double span = hi[a] - lo[a];
            const double scaled = span == 0.0 ? 1.0 : (series[s].values[a] - lo[a]) / span;
            const auto [x, y] = point_at(a, 0.1 + 0.9 * scaled);
            os << detail::fmt2(x) << ',' << detail::fmt2(y) << (a + 1 < axes ? " " : "");
        }
        os << "\"/>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % palette_size];
        const double y = 500.0 + 20.0 * static_cast<double>(s);
        os << "  <rect x=\"40\" y=\"" << detail::fmt2(y - 10.0)
           << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
        os << "  <text x=\"58\" y=\"" << detail::fmt2(y)
           << "\" font-family=\"sans-serif\" font-size=\"13\">" << series[s].name
           << "</text>\n";
    }

    os << "</svg>\n";
    return os.str();
}

// Builds the radar from evaluation reports: the five maximized metrics plus
// 1 - coverage/(l-1). Coverage is normalized only here, at plot time.
inline std::string radar_from_reports(const std::vector<std::string>& names,
                                      const std::vector<MetricsReport>& reports) {
    if (names.size() != reports.size() || reports.size() < 2)
        throw ConfigError("radar: need matching names for at least 2 reports");

    const std::vector<std::string> wanted = {"avg_auc",  "instance_auc", "macro_f1",
                                             "micro_f1", "instance_f1",  "coverage"};
    for (const MetricsReport& rep : reports)
        for (const std::string& key : wanted)
            if (rep.values.find(key) == rep.values.end())
                throw ShapeError("radar: reports do not share the metric key '" + key + "'");

    std::vector<std::string> axis_labels = {"avg_auc",  "instance_auc",   "macro_f1",
                                            "micro_f1", "instance_f1",    "1 - norm. coverage"};
    std::vector<RadarSeries> series;
    for (std::size_t s = 0; s < reports.size(); ++s) {
        const std::size_t l = reports[s].label_count;
        if (l < 2) throw ConfigError("radar: report lacks a usable '# labels:' count");
        RadarSeries rs;
        rs.name = names[s];
        for (const std::string& key : wanted) {
            double v = reports[s].values.at(key).mean;
            if (key == "coverage") v = 1.0 - v / static_cast<double>(l - 1);
            rs.values.push_back(v);
        }
        series.push_back(std::move(rs));
    }
    return render_radar_svg(axis_labels, series);
}

}  // namespace spmld
