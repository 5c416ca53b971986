#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace specmarket {

enum class TailMethod { least_squares, mle };

std::string_view to_string(TailMethod method) noexcept;

/// Power-law fit of a tail, prob{X > x} ~ c x^-alpha for x >= x_min.
struct TailFit {
    double alpha_hat = 0.0;
    double x_min = 0.0;
    std::size_t n_tail = 0;
    double ks = 0.0;  // KS distance between the tail and the fitted law
    TailMethod method = TailMethod::least_squares;
};

/// Fewest observations at or above x_min for which a fit is attempted.
inline constexpr std::size_t kMinTailCount = 10;

/// Sample CCDF at each distinct value, H(x) = #{X > x} / n (strict), in
/// increasing x. Zeros are kept in n but produce no point.
std::vector<std::pair<double, double>> empirical_ccdf(std::span<const double> data);

/// Least-squares slope of log y on log x, for already-computed curves.
double loglog_slope(std::span<const std::pair<double, double>> points);

/// Slope magnitude of log H against log x over the observations >= x_min.
/// H uses midpoint plotting positions: the k-th largest of n observations
/// sits at (k - 0.5) / n, so the sample maximum stays usable.
TailFit tail_fit_ls(std::span<const double> data, double x_min);

/// Hill / maximum-likelihood estimate n / sum log(x_i / x_min) over the
/// observations >= x_min. Has a small downward bias relative to tail_fit_ls.
TailFit tail_fit_mle(std::span<const double> data, double x_min);

/// Hill estimate on an explicit tail sample; every entry must be >= x_min.
double hill_estimate(std::span<const double> tail, double x_min);

/// Maximum candidates scanned by select_xmin.
inline constexpr std::size_t kMaxXminCandidates = 1000;

/// Minimum positive samples select_xmin accepts.
inline constexpr std::size_t kMinXminSamples = 50;

/// Cutoff minimizing the KS distance between the tail and its Hill-fitted
/// power law. Candidates are distinct sample values leaving at least
/// kMinTailCount observations, decimated to kMaxXminCandidates; ties go to
/// the smaller cutoff.
double select_xmin(std::span<const double> data);

/// select_xmin followed by the chosen estimator on |data|.
TailFit fit_tail(std::span<const double> data, TailMethod method = TailMethod::least_squares);

enum class AcfTransform { raw, absolute, squared };

std::string_view to_string(AcfTransform transform) noexcept;

struct AcfResult {
    AcfTransform transform = AcfTransform::raw;
    std::vector<std::size_t> lags;  // 1..max_lag
    std::vector<double> values;

    double mean_value(std::size_t first_lag, std::size_t last_lag) const;
    double mean_abs_value(std::size_t first_lag, std::size_t last_lag) const;

    /// Sum of |acf| over the reported lags. Finite by construction; only
    /// indicative of nonintegrable memory.
    double abs_sum() const;
};

/// Sample ACF with the global mean and global variance as normalization.
AcfResult sample_acf(std::span<const double> series, AcfTransform transform, std::size_t max_lag);

struct PowerLawAcfFit {
    double beta = 0.0;          // acf(h) ~ C h^-beta
    double log_intercept = 0.0;
    double rms_log_residual = 0.0;
};

/// Least-squares fit of log acf(h) = log C - beta log h over
/// lags [first_lag, last_lag]. All values in range must be positive.
PowerLawAcfFit acf_power_fit(const AcfResult& acf, std::size_t first_lag, std::size_t last_lag);

/// Population moments: std divides by n; kurtosis is m4 / m2^2 (3 for a
/// Gaussian). Skew and kurtosis are reported as 0 for a constant series.
struct SummaryStats {
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double max = 0.0;
    double skew = 0.0;
    double kurtosis = 0.0;
};

SummaryStats summary_stats(std::span<const double> series);

double median(std::vector<double> values);

/// Interquartile range with linear interpolation between order statistics.
double interquartile_range(std::vector<double> values);

} // namespace specmarket
