#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "specmarket/estimators.hpp"
#include "specmarket/random.hpp"

namespace specmarket {

/// GARCH(1,1) in standard form: sigma2_t = c + a r_{t-1}^2 + b sigma2_{t-1}.
struct GarchParams {
    double c = 0.1;
    double a = 0.1;
    double b = 0.899;

    double persistence() const noexcept { return a + b; }
    bool stationary() const noexcept { return a + b < 1.0; }
    void validate() const;
};

struct GarchPath {
    std::vector<double> r;
    std::vector<double> sigma2;
};

double garch_variance_step(const GarchParams& params, double r_prev, double sigma2_prev);

/// Starts from the stationary variance c / (1 - a - b) when it exists, else
/// from c. Gaussian innovations come from the garch substream.
GarchPath garch_simulate(const GarchParams& params, std::size_t T, std::uint64_t seed);

/// (a + b)^h for each lag.
std::vector<double> garch_acf_theoretical(double a, double b, std::span<const std::size_t> lags);

/// x_min * u^(-1/alpha), the inverse CCDF of a Pareto law.
double pareto_quantile(double alpha, double x_min, double u);

std::vector<double> pareto_sample(double alpha, double x_min, std::size_t N, std::uint64_t seed);

/// Fewest samples within kNearZeroFraction of zero, relative to the median
/// magnitude, for reciprocal_tail_check to proceed.
inline constexpr std::size_t kNearZeroCount = 10;
inline constexpr double kNearZeroFraction = 0.01;

/// Tail fit of |1/p|. A density that is positive at zero gives exponent 1.
TailFit reciprocal_tail_check(std::span<const double> prices,
                              TailMethod method = TailMethod::least_squares);

} // namespace specmarket
