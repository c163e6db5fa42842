#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lightcast/metrics.hpp"

namespace lightcast {

// Deterministic SVG 1.1 output: fixed canvas, fixed formatting, no wall-clock
// content, so identical inputs produce byte-identical files.

namespace svg_detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

constexpr double kWidth = 860, kHeight = 420;
constexpr double kLeft = 60, kRight = 20, kTop = 40, kBottom = 40;

struct Axis {
    double lo = 0, hi = 1;

    double place(double v, double pixel_lo, double pixel_hi) const {
        if (hi == lo) return (pixel_lo + pixel_hi) / 2;
        return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo);
    }
};

inline std::string polyline(const std::vector<double>& ys, const Axis& yaxis, const char* color) {
    std::string points;
    const double x0 = kLeft, x1 = kWidth - kRight;
    const std::size_t n = ys.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = n == 1 ? x0 : x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double y = kHeight - kBottom - yaxis.place(ys[i], 0, kHeight - kTop - kBottom);
        points += num(x) + "," + num(y) + " ";
    }
    return "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

inline std::string header(const std::string& title) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           num(kWidth) + "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
           num(kHeight) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<text x=\"" +
           num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + title + "</text>\n";
}

inline std::string y_gridlines(const Axis& axis) {
    std::string out;
    for (int i = 0; i <= 4; ++i) {
        const double v = axis.lo + (axis.hi - axis.lo) * i / 4.0;
        const double y = kHeight - kBottom - axis.place(v, 0, kHeight - kTop - kBottom);
        out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kWidth - kRight) +
               "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(v) +
               "</text>\n";
    }
    return out;
}

} // namespace svg_detail

/// Forecast-vs-actual overlay for one (model, target) pair over the test window.
inline std::string render_overlay(const std::string& model, const std::string& target,
                                  const std::vector<double>& actual,
                                  const std::vector<double>& forecast) {
    using namespace svg_detail;
    Axis yaxis;
    yaxis.lo = 1e300;
    yaxis.hi = -1e300;
    for (const auto* series : {&actual, &forecast})
        for (double v : *series) {
            yaxis.lo = std::min(yaxis.lo, v);
            yaxis.hi = std::max(yaxis.hi, v);
        }
    if (yaxis.lo > yaxis.hi) {
        yaxis.lo = 0;
        yaxis.hi = 1;
    }

    std::string svg = header(model + " / " + target + " test forecast");
    svg += y_gridlines(yaxis);
    svg += polyline(actual, yaxis, "#222222");
    svg += polyline(forecast, yaxis, "#1f6fcb");
    svg += "<text x=\"" + num(kLeft) + "\" y=\"" + num(kHeight - 12) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">actual</text>\n";
    svg += "<text x=\"" + num(kLeft + 70) + "\" y=\"" + num(kHeight - 12) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f6fcb\">forecast</text>\n";
    svg += "</svg>\n";
    return svg;
}

/// Grouped bars of test MAE and RMSE, one group per (model, target) row.
inline std::string render_metric_bars(const MetricsReport& report) {
    using namespace svg_detail;
    struct Bar {
        std::string label;
        double mae;
        double rmse;
    };
    std::vector<Bar> bars;
    for (const auto& row : report.rows)
        if (row.split == "test") bars.push_back({row.model + "/" + row.target, row.mae, row.rmse});

    Axis yaxis;
    yaxis.lo = 0;
    yaxis.hi = 1;
    for (const auto& b : bars) yaxis.hi = std::max({yaxis.hi, b.mae, b.rmse});

    std::string svg = header("test MAE and RMSE by model");
    svg += y_gridlines(yaxis);
    const double span = kWidth - kLeft - kRight;
    const double group = bars.empty() ? span : span / static_cast<double>(bars.size());
    const double bar_width = group * 0.3;
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double x0 = kLeft + group * static_cast<double>(i) + group * 0.15;
        const auto bar = [&](double value, double x, const char* color) {
            const double h = yaxis.place(value, 0, kHeight - kTop - kBottom);
            svg += "<rect x=\"" + num(x) + "\" y=\"" + num(kHeight - kBottom - h) + "\" width=\"" +
                   num(bar_width) + "\" height=\"" + num(h) + "\" fill=\"" + color + "\"/>\n";
        };
        bar(bars[i].mae, x0, "#1f6fcb");
        bar(bars[i].rmse, x0 + bar_width + group * 0.1, "#d1495b");
        svg += "<text x=\"" + num(x0 + bar_width + group * 0.05) + "\" y=\"" + num(kHeight - kBottom + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + bars[i].label +
               "</text>\n";
    }
    svg += "<text x=\"" + num(kLeft) + "\" y=\"" + num(kHeight - 8) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f6fcb\">MAE</text>\n";
    svg += "<text x=\"" + num(kLeft + 50) + "\" y=\"" + num(kHeight - 8) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d1495b\">RMSE</text>\n";
    svg += "</svg>\n";
    return svg;
}

/// Writes one overlay per (model, target) forecast plus a bar chart of test
/// metrics when the report is nonempty. Returns the written paths in order.
inline std::vector<std::string> emit_plots(
    const MetricsReport& report,
    const std::map<std::pair<std::string, std::string>, std::vector<double>>& forecasts,
    const std::map<std::string, std::vector<double>>& actuals, const std::string& out_dir) {
    std::vector<std::string> written;
    for (const auto& [key, forecast] : forecasts) {
        const auto& [model, target] = key;
        const auto it = actuals.find(target);
        if (it == actuals.end()) throw ValueError("emit_plots: no actuals for target " + target);
        const std::string path = out_dir + "/overlay_" + model + "_" + target + ".svg";
        svg_detail::write_file(path, render_overlay(model, target, it->second, forecast));
        written.push_back(path);
    }
    if (!report.rows.empty()) {
        const std::string path = out_dir + "/metrics_bars.svg";
        svg_detail::write_file(path, render_metric_bars(report));
        written.push_back(path);
    }
    return written;
}

} // namespace lightcast
