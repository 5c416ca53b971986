#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specmarket/estimators.hpp"
#include "specmarket/model.hpp"

namespace specmarket {

std::string_view library_version() noexcept;

enum class Table1Column { general, speculative };

std::string_view to_string(Table1Column column) noexcept;
std::optional<Table1Column> parse_table1_column(std::string_view text) noexcept;

/// Preset parameters of one column.
ModelParams table1_params(Table1Column column);

/// Deviation of price from expected value over one session, in units of v0.
struct BubbleMetrics {
    double amplitude = 0.0;    // max (p - v_e) / v0
    double rad = 0.0;          // mean |p - v_e| / v0
    double peak_period = 0.0;  // argmax (p - v_e), 1-based; a mean when averaged
    double crash_depth = 0.0;  // (max p - p_T) / max p
};

BubbleMetrics bubble_metrics(const SimulationPath& path, double v0);

/// Lags over which ACF summaries are averaged.
inline constexpr std::size_t kAcfSummaryLags = 100;

struct AcfSummary {
    double abs_returns = 0.0;      // mean acf(|r|) over lags 1..100
    double raw_returns_abs = 0.0;  // mean |acf(r)| over lags 1..100
};

struct SeedRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double mean_r = 0.0;
    double std_r = 0.0;
    std::optional<TailFit> tail;
    std::string tail_error;  // diagnostic text when the tail fit was refused
    std::optional<AcfSummary> acf;
    std::optional<BubbleMetrics> bubble;
};

struct AggregateStat {
    double median = 0.0;
    double iqr = 0.0;
    std::size_t count = 0;  // records contributing
};

struct Aggregates {
    AggregateStat mean_r;
    AggregateStat std_r;
    AggregateStat alpha_hat;
    AggregateStat acf_abs;
    AggregateStat acf_raw;
};

struct Provenance {
    ModelParams params;
    std::string version;
    std::uint64_t master_seed = 0;
    TailMethod tail_method = TailMethod::least_squares;
};

struct ExperimentReport {
    std::string scenario;
    std::vector<SeedRecord> records;  // ordered by index
    Aggregates aggregates;
    Provenance provenance;
};

/// Recomputes the aggregates from the records alone.
Aggregates aggregate_records(std::span<const SeedRecord> records);

/// Runs a column's preset. Path i uses path_seed(master_seed, i).
ExperimentReport reproduce_table1(Table1Column column, std::size_t n_seeds, std::uint64_t master_seed,
                                  TailMethod method = TailMethod::least_squares);

/// Same with explicit parameters, for scaled-down or modified runs.
ExperimentReport reproduce_table1(Table1Column column, const ModelParams& params, std::size_t n_seeds,
                                  std::uint64_t master_seed,
                                  TailMethod method = TailMethod::least_squares);

/// Fixed-width histogram of exponent estimates.
struct AlphaHistogram {
    double lo = 0.0;
    double width = 0.25;
    std::vector<std::size_t> counts;
    std::size_t overflow = 0;   // estimates >= lo + width * counts.size()

    /// Center of the most populated bin; the lower bin wins ties.
    std::optional<double> mode() const;
};

AlphaHistogram alpha_histogram(std::span<const double> alphas, double lo = 0.0, double hi = 6.0,
                               double width = 0.25);

struct EnsembleAlpha {
    ExperimentReport report;
    std::vector<double> alphas;       // successful fits, in path order
    std::size_t diagnostics = 0;      // paths whose tail fit was refused
    AlphaHistogram histogram;
};

EnsembleAlpha ensemble_alpha(const ModelParams& params, std::size_t n_paths, std::uint64_t master_seed,
                             TailMethod method = TailMethod::least_squares);

/// Variant with caller-chosen seeds, one path per entry.
EnsembleAlpha ensemble_alpha(const ModelParams& params, std::span<const std::uint64_t> seeds,
                             TailMethod method = TailMethod::least_squares);

struct BubbleCell {
    double mean_nI = 0.0;
    std::int64_t T = 0;
    std::size_t n_seeds = 0;
    BubbleMetrics mean;
    std::vector<BubbleMetrics> per_seed;
};

/// Declining-value sessions over a (mean_nI, T) grid. Every cell reuses the
/// seeds path_seed(master_seed, 0..n_seeds-1). Cells are ordered mean_nI
/// major, T minor.
std::vector<BubbleCell> bubble_sweep(std::span<const double> mean_nI_values,
                                     std::span<const std::int64_t> T_values, std::size_t n_seeds,
                                     std::uint64_t master_seed, const ModelParams& base = table1_general());

/// Pooled observations crash_tail needs before fitting.
inline constexpr std::size_t kMinPooledReturns = 1000;

struct CrashTailResult {
    TailFit fit;
    std::size_t sessions = 0;
    std::size_t pooled = 0;
};

/// Pools |r| of declining-value sessions of length T and fits the tail.
CrashTailResult crash_tail(std::size_t n_sessions, std::int64_t T, std::uint64_t seed,
                           const ModelParams& base = table1_general(),
                           TailMethod method = TailMethod::least_squares);

/// Same pooling for arbitrary session parameters.
CrashTailResult pooled_tail(const ModelParams& session, std::size_t n_sessions, std::uint64_t seed,
                            TailMethod method = TailMethod::least_squares);

} // namespace specmarket
