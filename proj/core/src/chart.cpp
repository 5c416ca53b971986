#include "specmarket/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "specmarket/errors.hpp"

namespace specmarket {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
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

bool placeable(double v, AxisScale scale) {
    return std::isfinite(v) && (scale == AxisScale::linear || v > 0.0);
}

double to_axis(double v, AxisScale scale) { return scale == AxisScale::log ? std::log10(v) : v; }

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool empty() const { return !(lo <= hi); }
    void widen() {
        if (hi == lo) {
            const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
    }
};

std::vector<double> linear_ticks(const Range& r) {
    const double span = r.hi - r.lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (span / step <= 6.0) {
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * span; t += step) {
        ticks.push_back(t);
    }
    return ticks;
}

// Ticks in axis units (log10 for log axes).
std::vector<double> axis_ticks(const Range& r, AxisScale scale) {
    if (scale == AxisScale::linear) {
        return linear_ticks(r);
    }
    std::vector<double> ticks;
    for (double e = std::ceil(r.lo); e <= std::floor(r.hi); e += 1.0) {
        ticks.push_back(e);
    }
    if (ticks.size() < 2) {
        return linear_ticks(r);
    }
    return ticks;
}

std::string axis_label(double axis_value, AxisScale scale) {
    if (scale == AxisScale::log && axis_value == std::round(axis_value)) {
        return "1e" + tick_text(axis_value);
    }
    return tick_text(scale == AxisScale::log ? std::pow(10.0, axis_value) : axis_value);
}

} // namespace

std::string render_svg(const Chart& chart) {
    Range xr;
    Range yr;
    std::size_t drawable = 0;
    for (const ChartSeries& s : chart.series) {
        if (s.x.size() != s.y.size()) {
            throw ValidationError("render_svg: series '" + s.label + "' has mismatched x and y");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (placeable(s.x[i], chart.x_scale) && placeable(s.y[i], chart.y_scale)) {
                xr.add(to_axis(s.x[i], chart.x_scale));
                yr.add(to_axis(s.y[i], chart.y_scale));
                ++drawable;
            }
        }
    }
    if (drawable == 0) {
        throw ValidationError("render_svg: no drawable data");
    }
    if (chart.band && chart.y_scale == AxisScale::linear) {
        yr.add(*chart.band);
        yr.add(-*chart.band);
    }
    xr.widen();
    yr.widen();

    const double w = chart.width;
    const double h = chart.height;
    const double pw = w - kLeft - kRight;
    const double ph = h - kTop - kBottom;
    auto px = [&](double axis_x) { return kLeft + (axis_x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double axis_y) { return kTop + (yr.hi - axis_y) / (yr.hi - yr.lo) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(chart.width) + "\" height=\"" +
           std::to_string(chart.height) + "\" viewBox=\"0 0 " + std::to_string(chart.width) + " " +
           std::to_string(chart.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(w / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(chart.title) + "</text>\n";

    svg += "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n";
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" +
           num(ph) + "\"/>\n</g>\n";

    svg += "<g class=\"ticks\" fill=\"#333\">\n";
    for (double t : axis_ticks(xr, chart.x_scale)) {
        const double x = px(t);
        svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(x) + "\" y2=\"" +
               num(kTop + ph + 5) + "\" stroke=\"#333\"/>";
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + ph + 17) + "\" text-anchor=\"middle\">" +
               axis_label(t, chart.x_scale) + "</text>\n";
    }
    for (double t : axis_ticks(yr, chart.y_scale)) {
        const double y = py(t);
        svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
               num(y) + "\" stroke=\"#333\"/>";
        svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
               axis_label(t, chart.y_scale) + "</text>\n";
    }
    svg += "</g>\n";
    svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(h - 10) + "\" text-anchor=\"middle\">" +
           escape(chart.x_label) + "</text>\n";
    svg += "<text x=\"14\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           num(kTop + ph / 2) + ")\">" + escape(chart.y_label) + "</text>\n";

    if (chart.band && chart.y_scale == AxisScale::linear) {
        svg += "<g class=\"band\" stroke=\"#c0392b\" stroke-dasharray=\"4 3\">\n";
        for (double b : {*chart.band, -*chart.band}) {
            svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(b)) + "\" x2=\"" + num(kLeft + pw) +
                   "\" y2=\"" + num(py(b)) + "\"/>\n";
        }
        svg += "</g>\n";
    }

    for (const ChartSeries& s : chart.series) {
        std::string pts;
        std::size_t count = 0;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!placeable(s.x[i], chart.x_scale) || !placeable(s.y[i], chart.y_scale)) {
                continue;
            }
            const std::string x = num(px(to_axis(s.x[i], chart.x_scale)));
            const std::string y = num(py(to_axis(s.y[i], chart.y_scale)));
            if (s.markers) {
                pts += "<circle cx=\"" + x + "\" cy=\"" + y + "\" r=\"1.6\"/>\n";
            } else {
                pts += (count > 0 ? " " : "") + x + "," + y;
            }
            ++count;
        }
        if (count == 0) {
            continue;
        }
        if (s.markers) {
            svg += "<g class=\"series\" data-label=\"" + escape(s.label) + "\" fill=\"" + s.color + "\">\n" + pts +
                   "</g>\n";
        } else {
            svg += "<polyline class=\"series\" data-label=\"" + escape(s.label) + "\" fill=\"none\" stroke=\"" +
                   s.color + "\" stroke-width=\"1\" points=\"" + pts + "\"/>\n";
        }
    }

    if (!chart.annotation.empty()) {
        svg += "<text class=\"annotation\" x=\"" + num(kLeft + pw - 8) + "\" y=\"" + num(kTop + 18) +
               "\" text-anchor=\"end\" font-size=\"13\">" + escape(chart.annotation) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

std::vector<double> periods(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<double>(i + 1);
    }
    return t;
}

void require_path(const SimulationPath& path) {
    if (path.size() == 0) {
        throw ValidationError("chart: empty path");
    }
}

} // namespace

Chart price_chart(const SimulationPath& path) {
    require_path(path);
    Chart c;
    c.title = "Price";
    c.x_label = "period";
    c.y_label = "price";
    c.series.push_back({periods(path.size()), path.p, "price", "#1f4e9c", false});
    c.series.push_back({periods(path.size()), path.v_e, "expected value", "#c0392b", false});
    return c;
}

Chart return_chart(const SimulationPath& path) {
    require_path(path);
    Chart c;
    c.title = "Return";
    c.x_label = "period";
    c.y_label = "return (%)";
    std::vector<double> pct(path.r.size());
    std::transform(path.r.begin(), path.r.end(), pct.begin(), [](double r) { return 100.0 * r; });
    c.series.push_back({periods(path.size()), std::move(pct), "return", "#1f4e9c", false});
    return c;
}

std::string alpha_label(double alpha) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "\xCE\xB1 = %.2f", alpha);
    return buf;
}

Chart ccdf_chart(std::span<const double> data, const std::optional<TailFit>& fit) {
    if (data.empty()) {
        throw ValidationError("ccdf_chart: empty data");
    }
    std::vector<double> magnitude(data.size());
    std::transform(data.begin(), data.end(), magnitude.begin(), [](double v) { return std::abs(v); });
    std::vector<std::pair<double, double>> points = empirical_ccdf(magnitude);
    points.erase(std::remove_if(points.begin(), points.end(), [](const auto& p) { return p.second <= 0.0; }),
                 points.end());
    if (points.size() > kMaxCcdfMarkers) {
        std::vector<std::pair<double, double>> kept;
        const double step = static_cast<double>(points.size() - 1) / static_cast<double>(kMaxCcdfMarkers - 1);
        for (std::size_t k = 0; k < kMaxCcdfMarkers; ++k) {
            kept.push_back(points[static_cast<std::size_t>(std::llround(static_cast<double>(k) * step))]);
        }
        points = std::move(kept);
    }
    Chart c;
    c.title = "Tail distribution";
    c.x_label = "|x|";
    c.y_label = "P(|X| > x)";
    c.x_scale = AxisScale::log;
    c.y_scale = AxisScale::log;
    ChartSeries s{{}, {}, "empirical", "#1f4e9c", true};
    for (const auto& [x, hval] : points) {
        s.x.push_back(x);
        s.y.push_back(hval);
    }
    c.series.push_back(std::move(s));
    if (fit) {
        const double x_max = *std::max_element(magnitude.begin(), magnitude.end());
        const double anchor = static_cast<double>(fit->n_tail) / static_cast<double>(magnitude.size());
        ChartSeries line{{fit->x_min, x_max},
                         {anchor, anchor * std::pow(x_max / fit->x_min, -fit->alpha_hat)},
                         "power-law fit",
                         "#c0392b",
                         false};
        c.series.push_back(std::move(line));
        c.annotation = alpha_label(fit->alpha_hat);
    }
    return c;
}

double white_noise_band(std::size_t series_length) {
    if (series_length == 0) {
        throw ValidationError("white_noise_band: series length must be >= 1");
    }
    return 3.0 / std::sqrt(static_cast<double>(series_length));
}

Chart acf_chart(const AcfResult& acf, std::size_t series_length) {
    if (acf.values.empty()) {
        throw ValidationError("acf_chart: empty autocorrelation");
    }
    Chart c;
    c.title = "Autocorrelation (" + std::string(to_string(acf.transform)) + ")";
    c.x_label = "lag";
    c.y_label = "acf";
    std::vector<double> lags(acf.lags.begin(), acf.lags.end());
    c.series.push_back({std::move(lags), acf.values, std::string(to_string(acf.transform)), "#1f4e9c", false});
    c.band = white_noise_band(series_length);
    return c;
}

} // namespace specmarket
