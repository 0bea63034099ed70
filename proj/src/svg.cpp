#include "edcast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace edcast::svg {

namespace {

constexpr double kMargin = 40.0;

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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

}  // namespace

std::string render(const Chart& chart) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t x_max = 1;
    auto extend = [&](std::size_t offset, const std::vector<double>& v) {
        for (double y : v) {
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        x_max = std::max(x_max, offset + v.size());
    };
    for (const auto& b : chart.bands) {
        extend(b.offset, b.lower);
        extend(b.offset, b.upper);
    }
    for (const auto& l : chart.lines) extend(l.offset, l.values);
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi <= lo) hi = lo + 1.0;

    const double w = chart.width;
    const double h = chart.height;
    const double plot_w = w - 2 * kMargin;
    const double plot_h = h - 2 * kMargin;
    auto px = [&](double x) {
        return kMargin + plot_w * x / static_cast<double>(std::max<std::size_t>(x_max - 1, 1));
    };
    auto py = [&](double y) { return kMargin + plot_h * (hi - y) / (hi - lo); };

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        chart.width, chart.height, chart.width, chart.height);
    out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", chart.width, chart.height);
    out += fmt::format("<text x=\"{:.1f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
                       kMargin, escape(chart.title));
    out += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"#444\"/>\n", kMargin,
        kMargin, h - kMargin);
    out += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#444\"/>\n", kMargin,
        h - kMargin, w - kMargin);
    out += fmt::format("<text x=\"4\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\">{:.4g}</text>\n",
                       kMargin + 4, hi);
    out += fmt::format("<text x=\"4\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\">{:.4g}</text>\n",
                       h - kMargin, lo);

    for (const auto& b : chart.bands) {
        if (b.lower.empty()) continue;
        std::string pts;
        for (std::size_t i = 0; i < b.upper.size(); ++i) {
            pts += fmt::format("{:.2f},{:.2f} ", px(double(b.offset + i)), py(b.upper[i]));
        }
        for (std::size_t i = b.lower.size(); i-- > 0;) {
            pts += fmt::format("{:.2f},{:.2f} ", px(double(b.offset + i)), py(b.lower[i]));
        }
        pts.pop_back();
        out += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"{:.2f}\" stroke=\"none\"/>\n",
                           pts, b.color, b.opacity);
    }
    double legend_y = kMargin;
    for (const auto& l : chart.lines) {
        if (l.values.empty()) continue;
        std::string pts;
        for (std::size_t i = 0; i < l.values.size(); ++i) {
            pts += fmt::format("{:.2f},{:.2f} ", px(double(l.offset + i)), py(l.values[i]));
        }
        pts.pop_back();
        out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"/>\n",
                           pts, l.color);
        out += fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n",
            w - kMargin - 120, legend_y, l.color, escape(l.label));
        legend_y += 14;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace edcast::svg
