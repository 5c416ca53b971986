#include "specmarket/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "specmarket/errors.hpp"

namespace specmarket {

void GarchParams::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw ValidationError("garch c: must be finite and > 0");
    }
    if (!(a >= 0.0) || !std::isfinite(a)) {
        throw ValidationError("garch a: must be finite and >= 0");
    }
    if (!(b >= 0.0) || !std::isfinite(b)) {
        throw ValidationError("garch b: must be finite and >= 0");
    }
}

double garch_variance_step(const GarchParams& params, double r_prev, double sigma2_prev) {
    return params.c + params.a * r_prev * r_prev + params.b * sigma2_prev;
}

GarchPath garch_simulate(const GarchParams& params, std::size_t T, std::uint64_t seed) {
    params.validate();
    if (T == 0) {
        throw ValidationError("garch_simulate: T must be >= 1");
    }
    Engine eng = make_engine(seed, Stream::garch);
    GarchPath out{std::vector<double>(T), std::vector<double>(T)};
    double sigma2 = params.stationary() ? params.c / (1.0 - params.persistence()) : params.c;
    for (std::size_t t = 0; t < T; ++t) {
        if (t > 0) {
            sigma2 = garch_variance_step(params, out.r[t - 1], sigma2);
        }
        out.sigma2[t] = sigma2;
        out.r[t] = std::sqrt(sigma2) * standard_normal(eng);
    }
    return out;
}

std::vector<double> garch_acf_theoretical(double a, double b, std::span<const std::size_t> lags) {
    std::vector<double> out;
    out.reserve(lags.size());
    for (std::size_t h : lags) {
        out.push_back(std::pow(a + b, static_cast<double>(h)));
    }
    return out;
}

double pareto_quantile(double alpha, double x_min, double u) {
    if (!(alpha > 0.0) || !(x_min > 0.0)) {
        throw ValidationError("pareto: alpha and x_min must be > 0");
    }
    if (!(u > 0.0 && u <= 1.0)) {
        throw ValidationError("pareto: u must lie in (0, 1]");
    }
    return x_min * std::pow(u, -1.0 / alpha);
}

std::vector<double> pareto_sample(double alpha, double x_min, std::size_t N, std::uint64_t seed) {
    if (N == 0) {
        throw ValidationError("pareto_sample: N must be >= 1");
    }
    Engine eng = make_engine(seed, Stream::pareto);
    std::vector<double> out(N);
    for (double& x : out) {
        x = pareto_quantile(alpha, x_min, uniform_open0(eng));
    }
    return out;
}

TailFit reciprocal_tail_check(std::span<const double> prices, TailMethod method) {
    if (prices.empty()) {
        throw ValidationError("reciprocal_tail_check: no samples");
    }
    std::vector<double> magnitude(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!std::isfinite(prices[i])) {
            throw ValidationError("reciprocal_tail_check: non-finite sample");
        }
        magnitude[i] = std::abs(prices[i]);
    }
    const double mid = median(magnitude);
    const double near = kNearZeroFraction * mid;
    const auto close = static_cast<std::size_t>(
        std::count_if(magnitude.begin(), magnitude.end(), [near](double x) { return x < near; }));
    if (close < kNearZeroCount) {
        throw InsufficientTail("reciprocal_tail_check: " + std::to_string(close) +
                               " samples near zero, need " + std::to_string(kNearZeroCount));
    }
    std::vector<double> reciprocal;
    reciprocal.reserve(magnitude.size());
    for (double x : magnitude) {
        if (x > 0.0) {
            reciprocal.push_back(1.0 / x);
        }
    }
    return fit_tail(reciprocal, method);
}

} // namespace specmarket
