#include "specmarket/kesten.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "path_kernel.hpp"
#include "specmarket/errors.hpp"
#include "specmarket/random.hpp"

namespace specmarket {

namespace {

constexpr double kAlphaLow = 1e-6;
constexpr double kAlphaHigh = 64.0;

// log E[n^alpha] for exponential n.
double log_moment_fn(double mean_n, double alpha) {
    return alpha * std::log(mean_n) + std::lgamma(alpha + 1.0);
}

} // namespace

SimulationPath simulate_speculative(const ModelParams& params, std::uint64_t seed) {
    params.validate();
    if (params.mean_nII != 0.0) {
        throw ValidationError("mean_nII: must be 0 for the speculation-only model");
    }
    if (!(params.mu_I < 1.0)) {
        throw ValidationError("mu_I: must be < 1 for the speculation-only model");
    }
    return detail::run_path(params, seed, detail::PathKind::speculative);
}

double kesten_moment(double mean_n, double alpha) {
    if (!(mean_n > 0.0) || !(alpha > 0.0) || !std::isfinite(mean_n) || !std::isfinite(alpha)) {
        throw ValidationError("kesten_moment: mean and exponent must be finite and > 0");
    }
    return std::exp(log_moment_fn(mean_n, alpha));
}

double stationarity_margin(double mean_n) {
    if (!(mean_n > 0.0) || !std::isfinite(mean_n)) {
        throw ValidationError("stationarity_margin: mean must be finite and > 0");
    }
    return std::log(mean_n) - kEulerGamma;
}

KestenRoot kesten_tail_root(double mean_n, double tol) {
    if (!(tol > 0.0)) {
        throw ValidationError("kesten_tail_root: tolerance must be > 0");
    }
    KestenRoot out;
    out.mean_n = mean_n;
    out.log_moment = stationarity_margin(mean_n);
    if (out.log_moment >= 0.0) {
        return out;
    }
    // log E[n^alpha] is convex, zero at alpha = 0 with negative slope there,
    // so it is negative just above 0 and crosses zero at most once.
    double lo = kAlphaLow;
    double hi = kAlphaHigh;
    if (!(log_moment_fn(mean_n, lo) < 0.0) || log_moment_fn(mean_n, hi) < 0.0) {
        return out;
    }
    double alpha = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        alpha = 0.5 * (lo + hi);
        const double f = log_moment_fn(mean_n, alpha);
        if (std::abs(std::expm1(f)) <= tol * 1e-3 || alpha == lo || alpha == hi) {
            break;
        }
        (f < 0.0 ? lo : hi) = alpha;
    }
    out.residual = std::abs(std::expm1(log_moment_fn(mean_n, alpha)));
    if (out.residual > tol) {
        throw DiagnosticError("kesten_tail_root: bisection stalled at residual " +
                              std::to_string(out.residual));
    }
    out.alpha_star = alpha;
    return out;
}

StationaryTailCheck validate_stationary_tail(double mean_n, const NewsNoise& noise, double gamma,
                                             std::size_t N, std::uint64_t seed, TailMethod method) {
    if (!(noise.std >= 0.0) || !(noise.prob_news >= 0.0 && noise.prob_news <= 1.0) ||
        !std::isfinite(noise.mean) || !std::isfinite(gamma)) {
        throw ValidationError("validate_stationary_tail: invalid noise or drift");
    }
    const KestenRoot root = kesten_tail_root(mean_n);
    if (!root.exists()) {
        throw NoKestenRoot("validate_stationary_tail: no positive root for mean " + std::to_string(mean_n) +
                           " (E[log n] = " + std::to_string(root.log_moment) + ")");
    }
    const std::size_t burn_in = std::max<std::size_t>(N / 10, 1000);
    if (N <= burn_in) {
        throw ValidationError("validate_stationary_tail: N must exceed the burn-in of " +
                              std::to_string(burn_in));
    }

    Engine weights = make_engine(seed, Stream::kesten);
    Engine shocks = make_engine(seed, Stream::shock_I);
    Engine news = make_engine(seed, Stream::news);
    std::vector<double> magnitude;
    magnitude.reserve(N - burn_in);
    double r = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
        const double n = exponential_mean(weights, mean_n);
        const double eps = normal(shocks, noise.mean, noise.std);
        const bool arrives = uniform01(news) < noise.prob_news;
        r = n * (r + (arrives ? eps : 0.0)) - gamma;
        if (t >= burn_in) {
            magnitude.push_back(std::abs(r));
        }
    }
    if (std::all_of(magnitude.begin(), magnitude.end(), [](double x) { return x == 0.0; })) {
        throw InsufficientTail("validate_stationary_tail: path is identically zero");
    }
    return {*root.alpha_star, fit_tail(magnitude, method), burn_in, magnitude.size()};
}

} // namespace specmarket
