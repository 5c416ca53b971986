#pragma once

#include <cstdint>
#include <optional>

#include "specmarket/estimators.hpp"
#include "specmarket/model.hpp"

namespace specmarket {

inline constexpr double kEulerGamma = 0.5772156649015329;

/// Speculation-only model: v^e = p, so r_t = n_t^I r_t^e - gamma with
/// r_t^e the adaptive expected return. With mu_I = 0 this is the
/// random-coefficient recursion r_t = n_t (r_{t-1} + eps_t news_t) - gamma.
/// Requires mean_nII = 0 and mu_I < 1.
SimulationPath simulate_speculative(const ModelParams& params, std::uint64_t seed);

/// E[n^alpha] for n exponential with the given mean: mean^alpha * Gamma(alpha + 1).
double kesten_moment(double mean_n, double alpha);

/// E[log n] = ln(mean) - Euler's gamma for exponential n.
double stationarity_margin(double mean_n);

struct KestenRoot {
    std::optional<double> alpha_star;  // empty: no positive root
    double residual = 0.0;             // |E[n^alpha*] - 1|
    double log_moment = 0.0;           // E[log n]
    double mean_n = 0.0;

    bool exists() const noexcept { return alpha_star.has_value(); }
};

/// Positive root of alpha -> E[n^alpha] = 1 for exponential n. Bracketed on
/// (1e-6, 64] then bisected until |E[n^alpha] - 1| <= tol. No root when
/// E[log n] >= 0 (nonstationary) or when the crossing lies beyond 64.
KestenRoot kesten_tail_root(double mean_n, double tol = 1e-12);

/// Noise of the speculative recursion: eps ~ N(mean, std), present with
/// probability prob_news.
struct NewsNoise {
    double mean = 1e-4;
    double std = 0.01;
    double prob_news = 1.0;
};

struct StationaryTailCheck {
    double alpha_star;
    TailFit fit;
    std::size_t burn_in;
    std::size_t samples;  // after burn-in
};

/// Simulates the zero-memory recursion for N steps, drops the first 10%
/// (at least 1000) as burn-in, and fits the tail of |r| with a KS-selected
/// cutoff. Throws NoKestenRoot when the root does not exist and
/// InsufficientTail when the path is degenerate.
StationaryTailCheck validate_stationary_tail(double mean_n, const NewsNoise& noise, double gamma,
                                             std::size_t N, std::uint64_t seed,
                                             TailMethod method = TailMethod::least_squares);

} // namespace specmarket
