#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specmarket/estimators.hpp"
#include "specmarket/model.hpp"

namespace specmarket {

enum class AxisScale { linear, log };

struct ChartSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color = "#1f4e9c";
    bool markers = false;  // scatter instead of a polyline
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    AxisScale x_scale = AxisScale::linear;
    AxisScale y_scale = AxisScale::linear;
    std::vector<ChartSeries> series;
    std::optional<double> band;  // dashed lines at +/- band
    std::string annotation;
    int width = 640;
    int height = 400;
};

/// Standalone SVG document. Points that cannot be placed on a log axis are
/// skipped. Throws ValidationError when no series has a drawable point.
std::string render_svg(const Chart& chart);

/// Price with the expected-value series overlaid.
Chart price_chart(const SimulationPath& path);

/// Returns in percent.
Chart return_chart(const SimulationPath& path);

/// Largest number of CCDF markers drawn; denser curves are thinned.
inline constexpr std::size_t kMaxCcdfMarkers = 1000;

/// Log-log CCDF of |data| with the fitted power law drawn from x_min when a
/// fit is given, annotated with its exponent.
Chart ccdf_chart(std::span<const double> data, const std::optional<TailFit>& fit);

/// 3 / sqrt(T).
double white_noise_band(std::size_t series_length);

Chart acf_chart(const AcfResult& acf, std::size_t series_length);

/// "α = 3.00" style label.
std::string alpha_label(double alpha);

} // namespace specmarket
