#include "specmarket/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "specmarket/errors.hpp"

namespace specmarket {

namespace {

std::vector<double> sorted_nonnegative(std::span<const double> data, const char* who) {
    std::vector<double> x(data.begin(), data.end());
    for (double v : x) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ValidationError(std::string(who) + ": data must be finite and nonnegative");
        }
    }
    std::sort(x.begin(), x.end());
    return x;
}

// KS distance between the sorted tail (all >= x_min) and the power law with
// exponent alpha. Tied values are treated as one jump of the empirical CDF.
double ks_distance(std::span<const double> log_tail, double log_xmin, double alpha) {
    const auto m = static_cast<double>(log_tail.size());
    double worst = 0.0;
    std::size_t j = 0;
    while (j < log_tail.size()) {
        std::size_t k = j;
        while (k + 1 < log_tail.size() && log_tail[k + 1] == log_tail[j]) {
            ++k;
        }
        const double model = -std::expm1(-alpha * (log_tail[j] - log_xmin));
        const double below = static_cast<double>(j) / m;
        const double above = static_cast<double>(k + 1) / m;
        worst = std::max({worst, std::abs(model - below), std::abs(model - above)});
        j = k + 1;
    }
    return std::min(worst, 1.0);
}

std::vector<double> logs_of(std::span<const double> x) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return std::log(v); });
    return out;
}

std::size_t first_at_least(const std::vector<double>& sorted, double x_min) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x_min) - sorted.begin());
}

void check_xmin(double x_min, const char* who) {
    if (!(x_min > 0.0) || !std::isfinite(x_min)) {
        throw ValidationError(std::string(who) + ": x_min must be finite and > 0");
    }
}

double quantile_sorted(const std::vector<double>& v, double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

} // namespace

std::string_view to_string(TailMethod method) noexcept {
    return method == TailMethod::least_squares ? "least-squares" : "mle";
}

std::string_view to_string(AcfTransform transform) noexcept {
    switch (transform) {
    case AcfTransform::raw: return "raw";
    case AcfTransform::absolute: return "absolute";
    case AcfTransform::squared: return "squared";
    }
    return "raw";
}

std::vector<std::pair<double, double>> empirical_ccdf(std::span<const double> data) {
    const std::vector<double> x = sorted_nonnegative(data, "empirical_ccdf");
    if (x.empty() || x.back() <= 0.0) {
        throw ValidationError("empirical_ccdf: needs positive samples");
    }
    const auto n = static_cast<double>(x.size());
    std::vector<std::pair<double, double>> out;
    std::size_t i = 0;
    while (i < x.size()) {
        std::size_t j = i;
        while (j + 1 < x.size() && x[j + 1] == x[i]) {
            ++j;
        }
        if (x[i] > 0.0) {
            out.emplace_back(x[i], static_cast<double>(x.size() - j - 1) / n);
        }
        i = j + 1;
    }
    return out;
}

double loglog_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) {
        throw ValidationError("loglog_slope: needs at least two points");
    }
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw ValidationError("loglog_slope: coordinates must be positive");
        }
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        sxy += dx * (std::log(y) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) {
        throw ValidationError("loglog_slope: all x coordinates equal");
    }
    return sxy / sxx;
}

TailFit tail_fit_ls(std::span<const double> data, double x_min) {
    check_xmin(x_min, "tail_fit_ls");
    const std::vector<double> x = sorted_nonnegative(data, "tail_fit_ls");
    const std::size_t start = first_at_least(x, x_min);
    const std::size_t m = x.size() - start;
    if (m < kMinTailCount) {
        throw InsufficientTail("tail_fit_ls: " + std::to_string(m) + " observations >= x_min, need " +
                               std::to_string(kMinTailCount));
    }
    const auto n = static_cast<double>(x.size());
    std::vector<double> lx(m);
    std::vector<double> lh(m);
    double mean_x = 0.0;
    double mean_h = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const auto rank_from_top = static_cast<double>(x.size() - (start + j));
        lx[j] = std::log(x[start + j]);
        lh[j] = std::log((rank_from_top - 0.5) / n);
        mean_x += lx[j];
        mean_h += lh[j];
    }
    mean_x /= static_cast<double>(m);
    mean_h /= static_cast<double>(m);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        sxy += (lx[j] - mean_x) * (lh[j] - mean_h);
        sxx += (lx[j] - mean_x) * (lx[j] - mean_x);
    }
    if (sxx == 0.0) {
        throw InsufficientTail("tail_fit_ls: all tail observations are equal");
    }
    const double alpha = -sxy / sxx;
    if (!(alpha > 0.0)) {
        throw InsufficientTail("tail_fit_ls: tail does not decay");
    }
    TailFit fit;
    fit.alpha_hat = alpha;
    fit.x_min = x_min;
    fit.n_tail = m;
    fit.ks = ks_distance(lx, std::log(x_min), alpha);
    fit.method = TailMethod::least_squares;
    return fit;
}

double hill_estimate(std::span<const double> tail, double x_min) {
    check_xmin(x_min, "hill_estimate");
    if (tail.empty()) {
        throw InsufficientTail("hill_estimate: empty tail");
    }
    double sum = 0.0;
    for (double v : tail) {
        if (!(v >= x_min)) {
            throw ValidationError("hill_estimate: tail sample below x_min");
        }
        sum += std::log(v / x_min);
    }
    if (sum <= 0.0) {
        throw InsufficientTail("hill_estimate: all tail samples equal x_min");
    }
    return static_cast<double>(tail.size()) / sum;
}

TailFit tail_fit_mle(std::span<const double> data, double x_min) {
    check_xmin(x_min, "tail_fit_mle");
    const std::vector<double> x = sorted_nonnegative(data, "tail_fit_mle");
    const std::size_t start = first_at_least(x, x_min);
    const std::size_t m = x.size() - start;
    if (m < kMinTailCount) {
        throw InsufficientTail("tail_fit_mle: " + std::to_string(m) + " observations >= x_min, need " +
                               std::to_string(kMinTailCount));
    }
    const std::span<const double> tail(x.data() + start, m);
    TailFit fit;
    fit.alpha_hat = hill_estimate(tail, x_min);
    fit.x_min = x_min;
    fit.n_tail = m;
    fit.ks = ks_distance(logs_of(tail), std::log(x_min), fit.alpha_hat);
    fit.method = TailMethod::mle;
    return fit;
}

double select_xmin(std::span<const double> data) {
    std::vector<double> x = sorted_nonnegative(data, "select_xmin");
    x.erase(x.begin(), std::upper_bound(x.begin(), x.end(), 0.0));
    if (x.size() < kMinXminSamples) {
        throw InsufficientTail("select_xmin: " + std::to_string(x.size()) + " positive samples, need " +
                               std::to_string(kMinXminSamples));
    }
    const std::size_t n = x.size();
    const std::vector<double> lx = logs_of(x);

    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        suffix[i] = suffix[i + 1] + lx[i];
    }

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i + kMinTailCount <= n; ++i) {
        if (i == 0 || x[i] != x[i - 1]) {
            candidates.push_back(i);
        }
    }
    if (candidates.size() > kMaxXminCandidates) {
        std::vector<std::size_t> kept(kMaxXminCandidates);
        const double step = static_cast<double>(candidates.size() - 1) /
                            static_cast<double>(kMaxXminCandidates - 1);
        for (std::size_t c = 0; c < kMaxXminCandidates; ++c) {
            kept[c] = candidates[static_cast<std::size_t>(std::llround(static_cast<double>(c) * step))];
        }
        candidates = std::move(kept);
    }

    constexpr double kNone = std::numeric_limits<double>::infinity();
    std::vector<double> distance(candidates.size(), kNone);
    auto evaluate = [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const std::size_t i = candidates[c];
            const auto m = static_cast<double>(n - i);
            const double log_sum = suffix[i] - m * lx[i];
            if (!(log_sum > 0.0)) {
                continue;
            }
            const double alpha = m / log_sum;
            distance[c] = ks_distance(std::span<const double>(lx.data() + i, n - i), lx[i], alpha);
        }
    };

    const std::size_t work = candidates.size() * n;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t threads = work > 2'000'000 ? std::min<std::size_t>(hw, 8) : 1;
    if (threads <= 1) {
        evaluate(0, candidates.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (candidates.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(candidates.size(), b + chunk);
            if (b < e) {
                pool.emplace_back(evaluate, b, e);
            }
        }
    }

    std::size_t best = candidates.size();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (distance[c] < kNone && (best == candidates.size() || distance[c] < distance[best])) {
            best = c;
        }
    }
    if (best == candidates.size()) {
        throw InsufficientTail("select_xmin: no candidate cutoff leaves a nondegenerate tail");
    }
    return x[candidates[best]];
}

TailFit fit_tail(std::span<const double> data, TailMethod method) {
    std::vector<double> magnitude(data.size());
    std::transform(data.begin(), data.end(), magnitude.begin(), [](double v) { return std::abs(v); });
    const double x_min = select_xmin(magnitude);
    return method == TailMethod::least_squares ? tail_fit_ls(magnitude, x_min)
                                               : tail_fit_mle(magnitude, x_min);
}

double AcfResult::mean_value(std::size_t first_lag, std::size_t last_lag) const {
    if (first_lag < 1 || last_lag < first_lag || last_lag > values.size()) {
        throw ValidationError("AcfResult: lag range outside the computed lags");
    }
    double s = 0.0;
    for (std::size_t h = first_lag; h <= last_lag; ++h) {
        s += values[h - 1];
    }
    return s / static_cast<double>(last_lag - first_lag + 1);
}

double AcfResult::mean_abs_value(std::size_t first_lag, std::size_t last_lag) const {
    if (first_lag < 1 || last_lag < first_lag || last_lag > values.size()) {
        throw ValidationError("AcfResult: lag range outside the computed lags");
    }
    double s = 0.0;
    for (std::size_t h = first_lag; h <= last_lag; ++h) {
        s += std::abs(values[h - 1]);
    }
    return s / static_cast<double>(last_lag - first_lag + 1);
}

double AcfResult::abs_sum() const {
    double s = 0.0;
    for (double v : values) {
        s += std::abs(v);
    }
    return s;
}

AcfResult sample_acf(std::span<const double> series, AcfTransform transform, std::size_t max_lag) {
    if (max_lag < 1) {
        throw ValidationError("sample_acf: max_lag must be >= 1");
    }
    if (series.size() <= max_lag + 1) {
        throw ValidationError("sample_acf: series length must exceed max_lag + 1");
    }
    std::vector<double> x(series.size());
    std::transform(series.begin(), series.end(), x.begin(), [transform](double v) {
        switch (transform) {
        case AcfTransform::absolute: return std::abs(v);
        case AcfTransform::squared: return v * v;
        case AcfTransform::raw: break;
        }
        return v;
    });
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double denom = 0.0;
    for (double& v : x) {
        v -= mean;
        denom += v * v;
    }
    if (!(denom > 0.0)) {
        throw DiagnosticError("sample_acf: zero variance after transform");
    }
    AcfResult out;
    out.transform = transform;
    out.lags.resize(max_lag);
    out.values.resize(max_lag);
    for (std::size_t h = 1; h <= max_lag; ++h) {
        double num = 0.0;
        for (std::size_t t = 0; t + h < x.size(); ++t) {
            num += x[t] * x[t + h];
        }
        out.lags[h - 1] = h;
        out.values[h - 1] = std::clamp(num / denom, -1.0, 1.0);
    }
    return out;
}

PowerLawAcfFit acf_power_fit(const AcfResult& acf, std::size_t first_lag, std::size_t last_lag) {
    if (first_lag < 1 || last_lag <= first_lag || last_lag > acf.values.size()) {
        throw ValidationError("acf_power_fit: lag range must hold two or more computed lags");
    }
    std::vector<std::pair<double, double>> pts;
    for (std::size_t h = first_lag; h <= last_lag; ++h) {
        const double v = acf.values[h - 1];
        if (!(v > 0.0)) {
            throw DiagnosticError("acf_power_fit: nonpositive autocorrelation at lag " + std::to_string(h));
        }
        pts.emplace_back(static_cast<double>(acf.lags[h - 1]), v);
    }
    const double slope = loglog_slope(pts);
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [h, v] : pts) {
        mx += std::log(h);
        my += std::log(v);
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    const double intercept = my - slope * mx;
    double ss = 0.0;
    for (const auto& [h, v] : pts) {
        const double e = std::log(v) - (intercept + slope * std::log(h));
        ss += e * e;
    }
    return {-slope, intercept, std::sqrt(ss / static_cast<double>(pts.size()))};
}

SummaryStats summary_stats(std::span<const double> series) {
    if (series.empty()) {
        throw ValidationError("summary_stats: empty series");
    }
    const auto n = static_cast<double>(series.size());
    SummaryStats s;
    s.mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    s.min = *lo;
    s.max = *hi;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : series) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.std = std::sqrt(m2);
    if (m2 > 0.0) {
        s.skew = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw ValidationError("median: empty input");
    }
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.5);
}

double interquartile_range(std::vector<double> values) {
    if (values.empty()) {
        throw ValidationError("interquartile_range: empty input");
    }
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
}

} // namespace specmarket
